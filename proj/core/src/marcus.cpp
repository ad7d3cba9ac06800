#include "roughbsde/marcus.hpp"

#include <algorithm>
#include <cmath>

namespace roughbsde {

namespace {

int auto_steps(const Vec& dw, double duration) {
    const double size = dw.norm() * std::abs(duration);
    return std::max(8, static_cast<int>(std::ceil(64.0 * size)));
}

Vec rk4(const VectorField& g, double t, const Vec& dw, Vec y, double duration, int steps) {
    const double h = duration / steps;
    for (int i = 0; i < steps; ++i) {
        const Vec k1 = g.apply(t, y, dw);
        const Vec k2 = g.apply(t, y + 0.5 * h * k1, dw);
        const Vec k3 = g.apply(t, y + 0.5 * h * k2, dw);
        const Vec k4 = g.apply(t, y + h * k3, dw);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!y.allFinite()) throw std::runtime_error("flow: non-finite state");
    return y;
}

}  // namespace

Mat expm(const Mat& A) {
    const double norm = A.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const Mat B = A / std::ldexp(1.0, squarings);
    Mat result = Mat::Identity(A.rows(), A.cols());
    Mat term = Mat::Identity(A.rows(), A.cols());
    for (int k = 1; k <= 30; ++k) {
        term = term * B / static_cast<double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() <= 1e-17 * result.cwiseAbs().maxCoeff()) break;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

Vec flow(const FlowRequest& req) {
    if (req.field == nullptr) throw std::invalid_argument("flow: missing vector field");
    const VectorField& g = *req.field;
    if (req.start.size() != g.h() || req.jump.size() != g.e())
        throw std::invalid_argument("flow: dimension mismatch");
    if (req.steps < 0) throw std::invalid_argument("flow: steps must be >= 1");
    if (req.jump.isZero(0.0) || req.duration == 0.0) return req.start;
    if (req.method == FlowMethod::Auto) {
        if (g.family() == VectorField::Family::Constant)
            return req.start + req.duration * g.apply(req.time, req.start, req.jump);
        if (g.family() == VectorField::Family::Linear)
            return expm(req.duration * g.linear_generator(req.time, req.jump)) * req.start;
    }
    const int steps = req.steps > 0 ? req.steps : auto_steps(req.jump, req.duration);
    return rk4(g, req.time, req.jump, req.start, req.duration, steps);
}

Vec flow(const VectorField& g, double t, const Vec& dw, const Vec& x, double duration, int steps,
         FlowMethod method) {
    FlowRequest req;
    req.field = &g;
    req.time = t;
    req.jump = dw;
    req.start = x;
    req.duration = duration;
    req.steps = steps;
    req.method = method;
    return flow(req);
}

std::vector<Vec> flow_samples(const VectorField& g, double t, const Vec& dw, const Vec& x, int m, int steps) {
    if (m < 1) throw std::invalid_argument("flow_samples: need m >= 1");
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(m) + 1);
    out.push_back(x);
    const bool closed = g.family() != VectorField::Family::SmoothBounded;
    const int sub = steps > 0 ? std::max(1, steps / m) : 0;
    for (int k = 1; k <= m; ++k) {
        const double u = static_cast<double>(k) / m;
        if (closed)
            out.push_back(flow(g, t, dw, x, u));
        else
            out.push_back(flow(g, t, dw, out.back(), 1.0 / m, sub));
    }
    return out;
}

Vec marcus_correction(const VectorField& g, double t, const Vec& y_plus, const Vec& dw, int steps) {
    return flow(g, t, dw, y_plus, 1.0, steps) - y_plus - g.apply(t, y_plus, dw);
}

YoungIntegralResult diamond_integral(const VectorField& g, const GridPath& Y, const GridPath& W, Anchor anchor) {
    if (Y.dim() != g.h() || W.dim() != g.e()) throw std::invalid_argument("diamond_integral: dimension mismatch");
    if (Y.is_cadlag() || W.is_cadlag()) throw std::invalid_argument("diamond_integral: paths must be caglad");
    if (std::abs(Y.horizon() - W.horizon()) > 1e-12 * std::max(1.0, Y.horizon()))
        throw std::invalid_argument("diamond_integral: grid mismatch");
    const std::vector<double> grid = merge_grids(Y.times(), W.times());
    const std::size_t K = grid.size();
    std::vector<Vec> values(K), right(K);
    Vec I = Vec::Zero(g.h());
    for (std::size_t k = 0; k < K; ++k) {
        const double u = grid[k];
        if (k > 0) {
            const Vec dw = W.eval_left(u) - W.eval_right(grid[k - 1]);
            if (dw.squaredNorm() > 0.0) I += g.apply(u, Y.eval(u), dw);
        }
        values[k] = I;
        if (k + 1 < K) {
            const Vec dw = W.eval_right(u) - W.eval(u);
            if (dw.squaredNorm() > 0.0) {
                const Vec yp = Y.eval_right(u);
                I += g.apply(u, yp, dw) + marcus_correction(g, u, yp, dw);
            }
        }
        right[k] = I;
    }
    const Vec total = I;
    if (anchor == Anchor::Right) {
        for (std::size_t k = 0; k < K; ++k) {
            values[k] = total - values[k];
            right[k] = total - right[k];
        }
    }
    PathMode mode = W.mode() == PathMode::CagladPureJump ? PathMode::CagladPureJump : W.mode();
    return {GridPath(grid, std::move(values), std::move(right), mode), 0.0, total};
}

}  // namespace roughbsde
