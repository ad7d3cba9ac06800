#include "roughbsde/pvariation.hpp"
#include "roughbsde/rbsde.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace roughbsde {

std::string_view to_string(JumpMode mode) { return mode == JumpMode::Forward ? "forward" : "marcus"; }

JumpMode parse_jump_mode(std::string_view text) {
    if (text == "forward") return JumpMode::Forward;
    if (text == "marcus") return JumpMode::Marcus;
    throw std::invalid_argument("unknown jump mode: " + std::string(text));
}

double Problem::cf() const { return declared_cf >= 0.0 ? declared_cf : f.bound(); }
double Problem::cg() const { return declared_cg >= 0.0 ? declared_cg : g.bound(); }

GridPath Problem::clock_or_identity() const {
    return clock.size() == 0 ? GridPath::identity(horizon) : clock;
}

void validate_problem(const Problem& pr) {
    if (!(pr.horizon > 0.0)) throw AssumptionError("horizon must be positive");
    if (!(pr.q >= 1.0 && pr.q < 2.0)) throw AssumptionError("driver regularity q must lie in [1, 2)");
    if (!(pr.p > 2.0)) throw AssumptionError("solution regularity p must exceed 2");
    if (!(1.0 / pr.p + 1.0 / pr.q > 1.0)) throw AssumptionError("need 1/p + 1/q > 1");
    if (std::abs(pr.W.horizon() - pr.horizon) > 1e-12 * std::max(1.0, pr.horizon))
        throw AssumptionError("driver horizon differs from problem horizon");
    if (pr.W.is_cadlag()) throw AssumptionError("driver W must be caglad");
    if (pr.W.dim() != pr.g.e()) throw AssumptionError("driver dimension differs from the vector field's");
    if (pr.xi.dim() != pr.g.h()) throw AssumptionError("terminal dimension differs from the vector field's");
    if (pr.f.family == Generator::Family::Affine && pr.f.a.size() != pr.g.h())
        throw AssumptionError("generator dimension differs from the state dimension");
    if (pr.declared_cf >= 0.0 && pr.declared_cf < pr.f.bound())
        throw AssumptionError("declared C_f is below the generator's bound");
    if (pr.declared_cg >= 0.0 && pr.declared_cg < pr.g.bound())
        throw AssumptionError("declared C_g is below the vector field's bound");
    if (pr.clock.size() != 0) {
        const GridPath& c = pr.clock;
        if (c.mode() != PathMode::ContinuousLinear || c.dim() != 1)
            throw AssumptionError("clock must be a continuous scalar path");
        if (std::abs(c.horizon() - pr.horizon) > 1e-12 * std::max(1.0, pr.horizon))
            throw AssumptionError("clock horizon differs from problem horizon");
        if (c.at(0)(0) != 0.0) throw AssumptionError("clock must start at 0");
        for (std::size_t i = 0; i + 1 < c.size(); ++i)
            if (c.at(i + 1)(0) < c.at(i)(0)) throw AssumptionError("clock must be nondecreasing");
        if (!(c.at(c.size() - 1)(0) > 0.0)) throw AssumptionError("clock must increase somewhere");
    }
}

EquationData equation_of(const Problem& problem) { return {problem.xi, problem.f, problem.g, problem.mode}; }

namespace {

/// First (lower) or last (upper) time at which a nondecreasing PL clock hits level.
double clock_inverse(const GridPath& c, double level, bool last) {
    const std::size_t n = c.size();
    if (!last) {
        if (level <= c.at(0)(0)) return 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double a = c.at(i)(0), b = c.at(i + 1)(0);
            if (b >= level) {
                if (b == a) return c.time(i);
                return c.time(i) + (level - a) / (b - a) * (c.time(i + 1) - c.time(i));
            }
        }
        return c.horizon();
    }
    if (level >= c.at(n - 1)(0)) return c.horizon();
    for (std::size_t i = n - 1; i > 0; --i) {
        const double a = c.at(i - 1)(0), b = c.at(i)(0);
        if (a <= level) {
            if (b == a) return c.time(i);
            return c.time(i - 1) + (level - a) / (b - a) * (c.time(i) - c.time(i - 1));
        }
    }
    return 0.0;
}

}  // namespace

TreeModel build_tree(const Problem& pr, const TreeConfig& config, std::size_t* snapped) {
    validate_problem(pr);
    if (config.steps < 1) throw std::invalid_argument("tree needs at least one Brownian step");
    const int n = config.steps;
    const double T = pr.horizon;
    const bool identity_clock = pr.clock.size() == 0;
    const GridPath c = pr.clock_or_identity();
    const double cT = c.at(c.size() - 1)(0);
    const double dc = cT / n;

    // Base slices: Brownian steps between consecutive clock levels, frozen
    // steps where the clock is flat at a level.
    std::vector<double> times, clocks;
    std::vector<StepKind> kinds;
    for (int k = 0; k <= n; ++k) {
        const double level = k == n ? cT : k * dc;
        double lo, hi;
        if (identity_clock) {
            lo = hi = k == n ? T : level;
        } else {
            lo = k == 0 ? 0.0 : clock_inverse(c, level, false);
            hi = k == n ? T : clock_inverse(c, level, true);
        }
        if (k > 0) kinds.push_back(StepKind::Brownian);
        times.push_back(lo);
        clocks.push_back(level);
        if (hi > lo) {
            kinds.push_back(StepKind::Frozen);
            times.push_back(hi);
            clocks.push_back(level);
        }
    }

    // Snap jumps of W onto base slices.
    const double tol = config.snap_tolerance >= 0.0 ? config.snap_tolerance : 0.5 * T / n;
    std::map<std::size_t, Vec> jump_at;
    std::vector<std::pair<double, Vec>> jumps;
    std::size_t moved = 0;
    for (std::size_t i = 0; i < pr.W.size(); ++i) {
        const Vec J = pr.W.jump_plus(i);
        if (J.isZero(0.0)) continue;
        const double tau = pr.W.time(i);
        jumps.emplace_back(tau, J);
        auto it = std::lower_bound(times.begin(), times.end(), tau);
        std::size_t best = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - times.begin(), times.size() - 1));
        if (best > 0 && std::abs(times[best - 1] - tau) <= std::abs(times[best] - tau)) --best;
        const double dist = std::abs(times[best] - tau);
        if (dist > tol) throw AssumptionError("jump of W too far from the solver grid");
        if (best + 1 == times.size()) {
            // W has no jump at T itself; a jump just before T moves to the last interior slice.
            if (dist <= 1e-12 * std::max(1.0, tau) || best == 0) throw AssumptionError("jump of W at the horizon");
            --best;
        }
        if (std::abs(times[best] - tau) > 1e-12 * std::max(1.0, tau)) ++moved;
        auto [pos, inserted] = jump_at.emplace(best, J);
        if (!inserted) pos->second += J;
    }
    if (snapped) *snapped = moved;

    TreeModel tree;
    tree.dc = dc;
    int depth = 0;
    auto push_slice = [&](std::size_t s) {
        tree.times.push_back(times[s]);
        tree.param_times.push_back(times[s]);
        tree.clock.push_back(clocks[s]);
        tree.depth.push_back(depth);
    };
    for (std::size_t s = 0; s < times.size(); ++s) {
        push_slice(s);
        if (auto it = jump_at.find(s); it != jump_at.end()) {
            tree.kinds.push_back(StepKind::Jump);
            tree.dw.push_back(it->second);
            push_slice(s);
        }
        if (s + 1 < times.size()) {
            const double a = times[s], b = times[s + 1];
            Vec inc = pr.W.eval(b) - pr.W.eval_right(a);
            for (const auto& [tau, J] : jumps)
                if (tau > a && tau < b) inc -= J;
            tree.kinds.push_back(kinds[s]);
            tree.dw.push_back(inc);
            if (kinds[s] == StepKind::Brownian) ++depth;
        }
    }
    return tree;
}

double default_eps_bar(double cf, double cg, double wq) {
    return std::min({0.25 / (1.0 + cf), 0.25 / (1.0 + cg), 0.2 / (1.0 + wq)});
}

// Pinned constants: c = 2^{p−1} (from the quasi-triangle inequality of the
// ‖·‖_{p,2} norm), λ = 1/2, ε̄ as in the solver, N the ε̄-partition count, and
// e = (C_f c_T + C_g ‖W‖_q)/N the activity per interval. Each interval grows
// the bound by (C₁ + 1) and adds C₂ + C₃; C₁ collapses to 0 when e = 0.
double apriori_bound(double cf, double cg, double cT, double wq, double xi_inf, double p) {
    if (cf < 0 || cg < 0 || cT < 0 || wq < 0 || xi_inf < 0) throw std::invalid_argument("apriori_bound: negative input");
    const double eps = default_eps_bar(cf, cg, wq);
    const double N = 1.0 + std::floor(std::max(cT, wq) / eps);
    const double e = (cf * cT + cg * wq) / N;
    const double c = std::pow(2.0, p - 1.0);
    const double lambda = 0.5;
    const double se = std::sqrt(e);
    const double C1 = c * ((1.0 + se) * std::sqrt(lambda * e + e / lambda) + e);
    const double C2 = c * (e + e * e + (1.0 + se) * std::sqrt(lambda * e + e + e * e));
    const double C3 = cg * wq;
    const double growth = C1 + 1.0;
    double geometric = 0.0;
    double power = 1.0;
    for (int j = 0; j < static_cast<int>(N); ++j) {
        geometric += power;
        power *= growth;
    }
    return power * xi_inf + (C2 + C3) * geometric;
}

}  // namespace roughbsde
