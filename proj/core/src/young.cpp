#include "roughbsde/young.hpp"

#include "roughbsde/pvariation.hpp"

#include <cmath>

namespace roughbsde {

namespace {

Vec mul(const Vec& a, const Vec& b) {
    if (a.size() == 1) return a(0) * b;
    if (b.size() == 1) return b(0) * a;
    if (a.size() != b.size()) throw std::invalid_argument("Young integral: dimension mismatch");
    return a.cwiseProduct(b);
}

int result_dim(const GridPath& x, const GridPath& y) {
    if (x.dim() == 1) return y.dim();
    if (y.dim() == 1) return x.dim();
    if (x.dim() != y.dim()) throw std::invalid_argument("Young integral: dimension mismatch");
    return x.dim();
}

YoungIntegralResult integrate(const GridPath& x, const GridPath& y, Anchor anchor, Regularity reg,
                              bool backward) {
    if (std::abs(x.horizon() - y.horizon()) > 1e-12 * std::max(1.0, x.horizon()))
        throw std::invalid_argument("Young integral: different horizons");
    const double cpq = young_loeve_constant(reg.p, reg.q);
    const std::vector<double> grid = merge_grids(x.times(), y.times());
    const std::size_t K = grid.size();
    const int dim = result_dim(x, y);

    std::vector<Vec> values(K), right(K);
    Vec I = Vec::Zero(dim);
    double remainder = 0.0;
    Vec prev_xa, prev_yr;
    for (std::size_t k = 0; k < K; ++k) {
        const double u = grid[k];
        const Vec xl = x.eval_left(u), xa = x.eval(u), xr = x.eval_right(u);
        const Vec yl = y.eval_left(u), ya = y.eval(u), yr = y.eval_right(u);
        if (k > 0) {
            const Vec dy = yl - prev_yr;
            if (dy.squaredNorm() > 0.0) {
                I += mul(backward ? xa : prev_xa, dy);
                remainder += cpq * p_variation(x, reg.p, grid[k - 1], u, Endpoint::OpenLeft) * dy.norm();
            }
        }
        const Vec left_value = I;
        if (k > 0) I += mul(backward ? xa : xl, ya - yl);
        const Vec at_value = I;
        if (k + 1 < K) I += mul(backward ? xr : xa, yr - ya);
        values[k] = y.is_cadlag() ? left_value : at_value;
        right[k] = I;
        prev_xa = xa;
        prev_yr = yr;
    }

    PathMode mode = y.mode();
    const Vec total = I;
    if (anchor == Anchor::Right) {
        for (std::size_t k = 0; k < K; ++k) {
            values[k] = total - values[k];
            right[k] = total - right[k];
        }
    }
    YoungIntegralResult out{GridPath(grid, std::move(values), std::move(right), mode), remainder, total};
    return out;
}

}  // namespace

double young_loeve_constant(double p, double q) {
    if (p < 1.0 || q < 1.0) throw std::invalid_argument("regularity exponents must be >= 1");
    const double theta = 1.0 / p + 1.0 / q;
    if (!(theta > 1.0)) throw std::invalid_argument("Young pairing requires 1/p + 1/q > 1");
    return 1.0 / (1.0 - std::pow(2.0, 1.0 - theta));
}

YoungIntegralResult backward_young(const GridPath& x, const GridPath& y, Anchor anchor, Regularity reg) {
    return integrate(x, y, anchor, reg, true);
}

YoungIntegralResult forward_young(const GridPath& x, const GridPath& y, Anchor anchor, Regularity reg) {
    return integrate(x, y, anchor, reg, false);
}

Vec jump_correction(const GridPath& x, const GridPath& y, JumpSide side) {
    const std::vector<double> grid = merge_grids(x.times(), y.times());
    Vec acc = Vec::Zero(result_dim(x, y));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double u = grid[k];
        if (side == JumpSide::Plus && k + 1 < grid.size())
            acc += mul(x.eval_right(u) - x.eval(u), y.eval_right(u) - y.eval(u));
        if (side == JumpSide::Minus && k > 0)
            acc += mul(x.eval(u) - x.eval_left(u), y.eval(u) - y.eval_left(u));
    }
    return acc;
}

DyPlusShift dy_plus_shift(const GridPath& x, const GridPath& y, double t) {
    if (!(x.is_cadlag() || x.mode() == PathMode::ContinuousLinear))
        throw std::invalid_argument("dy_plus_shift: x must be cadlag");
    if (y.is_cadlag()) throw std::invalid_argument("dy_plus_shift: y must be caglad");
    std::vector<double> grid = merge_grids(merge_grids(x.times(), y.times()), {t});
    const int dim = result_dim(x, y);
    DyPlusShift out{Vec::Zero(dim), Vec::Zero(dim), Vec::Zero(dim)};
    for (std::size_t k = 0; k < grid.size() && grid[k] <= t; ++k) {
        const double u = grid[k];
        const Vec jump = y.eval_right(u) - y.eval(u);
        if (k > 0) {
            const Vec dy = y.eval_left(u) - y.eval_right(grid[k - 1]);
            const Vec cell = mul(x.eval(grid[k - 1]), dy);
            out.with_plus += cell;
            out.plain += cell;
            out.with_plus += mul(x.eval_left(u), jump);
        }
        if (u < t) out.plain += mul(x.eval(u), jump);
    }
    out.boundary = mul(x.eval(t), y.eval_right(t) - y.eval(t)) - mul(x.eval(0.0), y.eval_right(0.0) - y.eval(0.0));
    return out;
}

DyPlusShift dy_plus_shift(const GridPath& x, const GridPath& y) { return dy_plus_shift(x, y, y.horizon()); }

double associativity_check(const GridPath& x, const GridPath& y, const GridPath& z) {
    if (z.is_cadlag()) throw std::invalid_argument("associativity_check: z must be caglad");
    const GridPath inner = backward_young(y, z).cumulative;
    const Vec lhs = backward_young(x, inner).total;
    const Vec rhs = backward_young(product(x, y), z).total;
    return (lhs - rhs).norm();
}

StabilityBound stability_bound_check(const GridPath& x1, const GridPath& x2, const GridPath& y1,
                                     const GridPath& y2, double p, double q) {
    const double cpq = young_loeve_constant(p, q);
    const GridPath i1 = backward_young(x1, y1).cumulative;
    const GridPath i2 = backward_young(x2, y2).cumulative;
    StabilityBound out;
    out.lhs = p_variation(combine(i1, 1.0, i2, -1.0), p);
    const GridPath dx = combine(x1, 1.0, x2, -1.0);
    const GridPath dy = combine(y1, 1.0, y2, -1.0);
    const double T = x1.horizon();
    out.rhs = (1.0 + cpq) * ((p_variation(dx, p) + dx.eval(T).norm()) * p_variation(y1, q) +
                             (p_variation(x2, p) + x2.eval(T).norm()) * p_variation(dy, q));
    return out;
}

}  // namespace roughbsde
