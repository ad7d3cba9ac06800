#include "roughbsde/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace roughbsde {

namespace {

const std::map<std::string_view, ScalarFunction> kFunctions = {
    {"linear", ScalarFunction::Linear},
    {"square", ScalarFunction::Square},
    {"exp-clipped", ScalarFunction::ExpClipped},
    {"sin", ScalarFunction::Sin},
};

}  // namespace

std::string_view to_string(ScalarFunction f) {
    for (const auto& [name, v] : kFunctions)
        if (v == f) return name;
    return "?";
}

ScalarFunction parse_scalar_function(std::string_view text) {
    auto it = kFunctions.find(text);
    if (it == kFunctions.end()) throw std::invalid_argument("unknown function: " + std::string(text));
    return it->second;
}

double eval_function(ScalarFunction f, double x, int derivative) {
    switch (f) {
        case ScalarFunction::Linear:
            return derivative == 0 ? 1.0 + 2.0 * x : derivative == 1 ? 2.0 : 0.0;
        case ScalarFunction::Square:
            return derivative == 0 ? x * x : derivative == 1 ? 2.0 * x : 2.0;
        case ScalarFunction::ExpClipped:
            if (std::abs(x) > 30.0) throw std::domain_error("exp-clipped: argument outside [-30, 30]");
            return std::exp(x);
        case ScalarFunction::Sin:
            switch (derivative % 4) {
                case 0: return std::sin(x);
                case 1: return std::cos(x);
                case 2: return -std::sin(x);
                default: return -std::cos(x);
            }
    }
    return 0.0;
}

std::vector<double> tree_brownian(const std::vector<std::uint8_t>& ups, double horizon) {
    if (ups.empty()) throw std::invalid_argument("tree_brownian: need at least one step");
    const double sq = std::sqrt(horizon / static_cast<double>(ups.size()));
    std::vector<double> M{0.0};
    for (std::uint8_t u : ups) M.push_back(M.back() + (u ? sq : -sq));
    return M;
}

double ito_residual(ScalarFunction f, const GridPath& A, const std::vector<double>& M, double horizon) {
    if (A.dim() != 1 || A.is_cadlag()) throw std::invalid_argument("ito_residual: A must be a scalar caglad path");
    if (std::abs(A.horizon() - horizon) > 1e-12 * std::max(1.0, horizon))
        throw std::invalid_argument("ito_residual: horizon mismatch");
    std::vector<double> grid = A.times();
    std::vector<double> tree_times;
    const std::size_t n = M.empty() ? 0 : M.size() - 1;
    for (std::size_t k = 0; k <= n && n > 0; ++k)
        tree_times.push_back(k == n ? horizon : horizon * static_cast<double>(k) / static_cast<double>(n));
    if (n > 0) grid = merge_grids(grid, tree_times);
    auto m_at = [&](double u) {
        if (n == 0) return 0.0;
        auto it = std::upper_bound(tree_times.begin(), tree_times.end(), u + 1e-12 * std::max(1.0, u));
        return M[static_cast<std::size_t>(it - tree_times.begin()) - 1];
    };
    auto F = [&](double x, int d) { return eval_function(f, x, d); };

    const double y0 = m_at(grid[0]) + A.eval(grid[0])(0);
    double integral = 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double m0 = m_at(grid[i]), m1 = m_at(grid[i + 1]);
        const double a0 = A.eval(grid[i])(0), a0p = A.eval_right(grid[i])(0), a1 = A.eval(grid[i + 1])(0);
        const double y = m0 + a0, yp = m0 + a0p, y1 = m1 + a1;
        const double jump = a0p - a0;
        if (jump != 0.0) {
            // Young term at the jump (integrand at the right limit) and the jump correction.
            integral += F(yp, 1) * jump;
            integral += F(yp, 0) - F(y, 0) - F(yp, 1) * jump;
        }
        const double dM = m1 - m0, dA = a1 - a0p;
        integral += F(y1, 1) * dA;
        integral += F(yp, 1) * dM + 0.5 * F(yp, 2) * dM * dM;
        worst = std::max(worst, std::abs(F(y1, 0) - F(y0, 0) - integral));
    }
    return worst;
}

QvLadder qv_check(const GridPath& A, int steps, const std::vector<int>& strides, int n_paths, std::uint64_t seed) {
    if (A.dim() != 1 || A.is_cadlag()) throw std::invalid_argument("qv_check: A must be a scalar caglad path");
    if (steps < 1 || strides.empty()) throw std::invalid_argument("qv_check: need steps and a ladder");
    for (int s : strides)
        if (s < 1) throw std::invalid_argument("qv_check: strides must be >= 1");
    const double T = A.horizon();
    const double dt = T / steps;
    QvLadder out;
    out.strides = strides;
    for (std::size_t i = 0; i < A.size(); ++i) out.jump_part += A.jump_plus(i).squaredNorm();
    const double target = (n_paths > 0 ? T : 0.0) + out.jump_part;

    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    const int paths = std::max(1, n_paths);
    std::vector<double> sq(strides.size(), 0.0);
    std::vector<double> a(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k) a[static_cast<std::size_t>(k)] = A.eval(k == steps ? T : k * dt)(0);
    for (int path = 0; path < paths; ++path) {
        std::vector<double> M(static_cast<std::size_t>(steps) + 1, 0.0);
        if (n_paths > 0) {
            const double s = std::sqrt(dt);
            for (int k = 1; k <= steps; ++k)
                M[static_cast<std::size_t>(k)] = M[static_cast<std::size_t>(k) - 1] + (coin(rng) ? s : -s);
        }
        for (std::size_t l = 0; l < strides.size(); ++l) {
            double S = 0.0;
            int prev = 0;
            for (int k = strides[l];; k += strides[l]) {
                const int cur = std::min(k, steps);
                const double d = (M[static_cast<std::size_t>(cur)] + a[static_cast<std::size_t>(cur)]) -
                                 (M[static_cast<std::size_t>(prev)] + a[static_cast<std::size_t>(prev)]);
                S += d * d;
                prev = cur;
                if (cur == steps) break;
            }
            sq[l] += (S - target) * (S - target);
        }
    }
    out.monotone = true;
    for (std::size_t l = 0; l < strides.size(); ++l) {
        out.rms_residual.push_back(std::sqrt(sq[l] / paths));
        if (l > 0 && out.rms_residual[l] > out.rms_residual[l - 1]) out.monotone = false;
    }
    return out;
}

}  // namespace roughbsde
