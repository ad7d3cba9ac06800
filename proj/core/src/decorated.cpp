#include "roughbsde/decorated.hpp"

#include "roughbsde/marcus.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace roughbsde {

Vec DecoratedPath::excursion_at(std::size_t k, double u) const {
    const auto& ex = excursions.at(k);
    const double m = static_cast<double>(ex.size() - 1);
    const double x = std::clamp(u, 0.0, 1.0) * m;
    const std::size_t i = std::min(static_cast<std::size_t>(x), ex.size() - 2);
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * ex[i] + w * ex[i + 1];
}

void DecoratedPath::validate() const {
    if (base.is_cadlag()) throw std::invalid_argument("decorated path: base must be caglad");
    if (jump_set.size() != excursions.size()) throw std::invalid_argument("decorated path: excursion/jump mismatch");
    for (std::size_t k = 0; k < jump_set.size(); ++k) {
        if (k > 0 && !(jump_set[k] > jump_set[k - 1])) throw std::invalid_argument("decorated path: jump set not increasing");
        const std::size_t i = base.find_time(jump_set[k]);
        if (i == GridPath::npos) throw std::invalid_argument("decorated path: jump time off the grid");
        if (i + 1 == base.size()) throw std::invalid_argument("decorated path: excursion at the horizon");
        if (excursions[k].size() < 2) throw std::invalid_argument("decorated path: excursion needs >= 2 samples");
        for (const Vec& v : excursions[k])
            if (v.size() != base.dim()) throw std::invalid_argument("decorated path: excursion dimension");
        const double scale = 1.0 + base.right(i).norm();
        if ((excursions[k].front() - base.right(i)).norm() > 1e-9 * scale)
            throw std::invalid_argument("decorated path: excursion must start at the right limit");
    }
    for (double t : base.jump_times()) {
        bool found = false;
        for (double s : jump_set)
            if (std::abs(s - t) <= 1e-12) found = true;
        if (!found) throw std::invalid_argument("decorated path: jump of the base path missing from the jump set");
    }
}

namespace {

DecoratedPath embed(const GridPath& h, int samples, bool linear) {
    if (h.is_cadlag()) throw std::invalid_argument("embedding needs a caglad path");
    if (samples < 2) throw std::invalid_argument("embedding needs >= 2 excursion samples");
    DecoratedPath out{h, {}, {}};
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h.right(i) == h.at(i)) continue;
        std::vector<Vec> ex;
        for (int k = 0; k < samples; ++k) {
            const double u = static_cast<double>(k) / (samples - 1);
            ex.push_back(linear ? Vec((1.0 - u) * h.right(i) + u * h.at(i)) : h.right(i));
        }
        out.jump_set.push_back(h.time(i));
        out.excursions.push_back(std::move(ex));
    }
    return out;
}

}  // namespace

DecoratedPath embed_iota(const GridPath& h, int samples) { return embed(h, samples, false); }
DecoratedPath embed_jmath(const GridPath& h, int samples) { return embed(h, samples, true); }

std::vector<double> tau_weights(std::size_t m, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("tau: delta must be positive");
    double r = 0.0;
    for (std::size_t j = 1; j <= m; ++j) r += std::ldexp(1.0, -static_cast<int>(j));
    std::vector<double> w;
    for (std::size_t k = 1; k <= m; ++k) w.push_back(std::ldexp(1.0, -static_cast<int>(k)) * delta / r);
    return w;
}

double TauMap::operator()(double t) const {
    double s = t;
    for (std::size_t k = 0; k < jumps.size(); ++k)
        if (jumps[k] < t) s += weights[k];
    return s;
}

double TauMap::right(double t) const {
    double s = t;
    for (std::size_t k = 0; k < jumps.size(); ++k)
        if (jumps[k] <= t) s += weights[k];
    return s;
}

TauMap tau_delta(const std::vector<double>& jump_set, double delta, double horizon) {
    if (!std::is_sorted(jump_set.begin(), jump_set.end())) throw std::invalid_argument("tau: jump set must be sorted");
    return {jump_set, tau_weights(jump_set.size(), delta), delta, horizon};
}

DeltaExtension delta_extension(const DecoratedPath& phi, double delta) {
    phi.validate();
    TauMap tau = tau_delta(phi.jump_set, delta, phi.base.horizon());
    const GridPath& h = phi.base;
    std::vector<double> t;
    std::vector<Vec> values, right;
    double offset = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double s = h.time(i) + offset;
        if (k < phi.jumps() && std::abs(phi.jump_set[k] - h.time(i)) <= 1e-12) {
            const auto& ex = phi.excursions[k];
            const double r = tau.weights[k];
            const std::size_t m = ex.size() - 1;
            t.push_back(s);
            values.push_back(h.at(i));
            right.push_back(ex[m]);
            for (std::size_t j = m; j-- > 0;) {
                const double u = static_cast<double>(j) / static_cast<double>(m);
                t.push_back(s + r * (1.0 - u));
                values.push_back(ex[j]);
                right.push_back(ex[j]);
            }
            offset += r;
            ++k;
        } else {
            t.push_back(s);
            values.push_back(h.at(i));
            right.push_back(h.right(i));
        }
    }
    if (phi.jumps() == 0) {
        t.push_back(h.horizon() + delta);
        values.push_back(h.at(h.size() - 1));
        right.push_back(h.at(h.size() - 1));
    }
    // The final point is the horizon T+δ up to rounding of the offsets.
    t.back() = h.horizon() + delta;
    return {GridPath(std::move(t), std::move(values), std::move(right), PathMode::CagladLinear), std::move(tau)};
}

std::vector<Vec> retract(const DeltaExtension& ext, const std::vector<double>& times) {
    std::vector<Vec> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(ext.path.eval(std::min(ext.tau(t), ext.path.horizon())));
    return out;
}

DecoratedPath lift_solution(const GridPath& Y, const VectorField& g, const GridPath& W, JumpMode mode,
                            int samples) {
    if (samples < 2) throw std::invalid_argument("lift_solution: need >= 2 excursion samples");
    if (Y.dim() != g.h() || W.dim() != g.e()) throw std::invalid_argument("lift_solution: dimension mismatch");
    std::set<double> pi;
    for (double t : W.jump_times()) {
        if (Y.find_time(t) == GridPath::npos) throw std::invalid_argument("lift_solution: jump of W missing from Y's grid");
        pi.insert(Y.time(Y.find_time(t)));
    }
    for (double t : Y.jump_times()) pi.insert(t);
    DecoratedPath out{Y, {}, {}};
    for (double t : pi) {
        const std::size_t i = Y.find_time(t);
        const Vec y_plus = Y.right(i);
        const std::size_t w = W.find_time(t);
        const Vec dw = w == GridPath::npos ? Vec::Zero(W.dim()) : W.jump_plus(w);
        std::vector<Vec> ex;
        if (mode == JumpMode::Marcus && !dw.isZero(0.0))
            ex = flow_samples(g, t, dw, y_plus, samples - 1);
        else
            ex.assign(static_cast<std::size_t>(samples), y_plus);
        out.jump_set.push_back(t);
        out.excursions.push_back(std::move(ex));
    }
    return out;
}

GridPath compose(const GridPath& x, const GridPath& lambda) {
    if (lambda.dim() != 1 || lambda.mode() != PathMode::ContinuousLinear)
        throw std::invalid_argument("compose: lambda must be a continuous scalar path");
    std::vector<double> grid = lambda.times();
    // Preimages of x's breakpoints under each linear piece of λ.
    for (std::size_t i = 0; i + 1 < lambda.size(); ++i) {
        const double a = lambda.at(i)(0), b = lambda.at(i + 1)(0);
        if (b <= a) continue;
        for (double u : x.times())
            if (u > a && u < b)
                grid.push_back(lambda.time(i) + (u - a) / (b - a) * (lambda.time(i + 1) - lambda.time(i)));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
               grid.end());
    std::vector<Vec> values, right;
    bool continuous = true;
    for (double s : grid) {
        const double u = std::clamp(lambda.eval(s)(0), 0.0, x.horizon());
        values.push_back(x.eval(u));
        right.push_back(x.eval_right(u));
        if (values.back() != right.back()) continuous = false;
    }
    right.back() = values.back();
    if (continuous) return GridPath::continuous(std::move(grid), std::move(values));
    return GridPath(std::move(grid), std::move(values), std::move(right), PathMode::CagladLinear);
}

}  // namespace roughbsde
