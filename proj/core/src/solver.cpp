#include "roughbsde/marcus.hpp"
#include "roughbsde/pvariation.hpp"
#include "roughbsde/rbsde.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace roughbsde {

namespace {

Vec jump_map(const EquationData& eq, double t, const Vec& dw, const Vec& y_plus) {
    if (eq.mode == JumpMode::Marcus) return flow(eq.g, t, dw, y_plus);
    return y_plus + eq.g.apply(t, y_plus, dw);
}

/// Increment added to Y_{s+1} by the driver term of step s, evaluated at y.
/// On linear pieces of W the cell's Young term is resolved by the flow along
/// the piece; it differs from the right-endpoint sum by O(|ΔW|²), which sums
/// to zero under refinement when q < 2.
Vec driver_increment(const EquationData& eq, const TreeModel& tree, std::size_t s, const Vec& y) {
    const Vec& dw = tree.dw[s];
    if (dw.isZero(0.0)) return Vec::Zero(y.size());
    if (tree.kinds[s] == StepKind::Jump) return jump_map(eq, tree.param_times[s], dw, y) - y;
    return flow(eq.g, tree.param_times[s + 1], dw, y) - y;
}

/// E_{(s,j)}[F_b] for every node in [a, b), written into F.
void conditional_expectation(const TreeModel& tree, NodeField& F, std::size_t a, std::size_t b) {
    for (std::size_t s = b; s-- > a;) {
        for (int j = 0; j < tree.nodes(s); ++j) {
            if (tree.kinds[s] == StepKind::Brownian)
                F.at(s, j) = 0.5 * (F.at(s + 1, j + 1) + F.at(s + 1, j));
            else
                F.at(s, j) = F.at(s + 1, j);
        }
    }
}

NodeField window_difference(const TreeModel& tree, const NodeField& A, const NodeField& B, std::size_t a,
                            std::size_t b) {
    NodeField D(tree, A.dim);
    for (std::size_t s = a; s <= b; ++s)
        for (std::size_t k = 0; k < D.data[s].size(); ++k) D.data[s][k] = A.data[s][k] - B.data[s][k];
    return D;
}

double field_max_abs(const NodeField& F) {
    double m = 0.0;
    for (const auto& slice : F.data)
        for (double v : slice) m = std::max(m, std::abs(v));
    return m;
}

struct Segment {
    std::size_t a;
    std::size_t b;
    bool jumps_only;
};

std::vector<Segment> segments_for(const TreeModel& tree, double q, double eps_bar, std::size_t* forced) {
    const GridPath W = tree.driver_path();
    const GridPath c = tree.clock_path();
    const Partition part = find_partition(W, c, q, eps_bar);
    if (forced) *forced = part.forced_cells;
    std::set<double> boundary(part.breakpoints.begin(), part.breakpoints.end());
    for (std::size_t s = 0; s < tree.steps(); ++s)
        if (tree.kinds[s] == StepKind::Jump) boundary.insert(tree.times[s]);

    // Every boundary time contributes its first and last slice.
    std::set<std::size_t> cuts{0, tree.slices() - 1};
    for (auto [first, last] : tree.time_slices()) {
        if (boundary.count(tree.times[first])) {
            cuts.insert(first);
            cuts.insert(last);
        }
    }
    std::vector<std::size_t> v(cuts.begin(), cuts.end());
    std::vector<Segment> out;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        bool jumps_only = true;
        for (std::size_t s = v[i]; s < v[i + 1]; ++s)
            if (tree.kinds[s] != StepKind::Jump) jumps_only = false;
        out.push_back({v[i], v[i + 1], jumps_only});
    }
    return out;
}

}  // namespace

Vec Solution::z0() const {
    for (std::size_t s = 0; s < tree.steps(); ++s)
        if (tree.kinds[s] == StepKind::Brownian) return Z.at(s, 0);
    return Z.at(0, 0);
}

GridPath Solution::path(const std::vector<std::uint8_t>& ups) const {
    const std::vector<int> nodes = tree.path_nodes(ups);
    std::vector<double> t;
    std::vector<Vec> values, right;
    bool jumps = false;
    for (auto [first, last] : tree.time_slices()) {
        t.push_back(tree.times[first]);
        values.emplace_back(Y.at(first, nodes[first]));
        right.emplace_back(Y.at(last, nodes[last]));
        if (values.back() != right.back()) jumps = true;
    }
    if (!jumps) return GridPath::continuous(std::move(t), std::move(values));
    return GridPath(std::move(t), std::move(values), std::move(right), PathMode::CagladLinear);
}

std::pair<NodeField, NodeField> picard_step(const EquationData& eq, const TreeModel& tree, const NodeField& Y_prev,
                                            const NodeField& Z_prev, std::size_t a, std::size_t b) {
    if (!Y_prev.matches(tree) || !Z_prev.matches(tree)) throw std::invalid_argument("picard_step: field/tree mismatch");
    if (a >= b || b >= tree.slices()) throw std::out_of_range("picard_step: interval not aligned with the tree");
    NodeField Y = Y_prev;
    NodeField Z = Z_prev;
    const double sq = tree.sqrt_dc();
    for (std::size_t s = b; s-- > a;) {
        for (int j = 0; j < tree.nodes(s); ++j) {
            if (tree.kinds[s] == StepKind::Brownian) {
                const Vec up = Y.at(s + 1, j + 1) + driver_increment(eq, tree, s, Y_prev.at(s + 1, j + 1));
                const Vec down = Y.at(s + 1, j) + driver_increment(eq, tree, s, Y_prev.at(s + 1, j));
                const Vec drift = eq.f.eval(tree.param_times[s], Y_prev.at(s, j), Z_prev.at(s, j)) * tree.dc;
                Y.at(s, j) = 0.5 * (up + down) + drift;
                Z.at(s, j) = (up - down) / (2.0 * sq);
            } else {
                Y.at(s, j) = Y.at(s + 1, j) + driver_increment(eq, tree, s, Y_prev.at(s + 1, j));
                Z.at(s, j) = Z.at(s + 1, j);
            }
        }
    }
    return {std::move(Y), std::move(Z)};
}

double picard_distance(const TreeModel& tree, const NodeField& dY, const NodeField& dZ, std::size_t a,
                       std::size_t b) {
    // The variation part misses a constant offset; the sup at the right end
    // restores it so that a shifted iterate never counts as converged.
    double end = 0.0;
    for (int j = 0; j < tree.nodes(b); ++j) end = std::max(end, dY.at(b, j).norm());
    return p2_norm_upper(tree, dY, a, b) + end + bmo_norm_estimate(tree, dZ, a, b);
}

Solution solve_on_tree(const EquationData& eq, const TreeModel& tree, double p, double q, double cf, double cg,
                       const SolverOptions& options) {
    if (!(options.tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
    if (options.max_iter < 1) throw std::invalid_argument("solver needs max_iter >= 1");
    const int h = eq.xi.dim();
    if (eq.g.h() != h) throw AssumptionError("terminal dimension differs from the vector field's");
    const std::size_t S = tree.slices() - 1;

    const GridPath Wgrid = tree.driver_path();
    const double wq = p_variation(Wgrid, q);
    const double cT = tree.clock.back() - tree.clock.front();

    Solution sol{tree, NodeField(tree, h), NodeField(tree, h), {}};
    double eps_bar = default_eps_bar(cf, cg, wq);
    std::ostringstream failures;
    for (int shrink = 0;; ++shrink) {
        NodeField Y(tree, h), Z(tree, h);
        for (int j = 0; j < tree.nodes(S); ++j) Y.at(S, j) = eq.xi.eval(tree.brownian_value(S, j));
        std::size_t forced = 0;
        const std::vector<Segment> segs = segments_for(tree, q, eps_bar, &forced);
        std::vector<IntervalTrace> traces;
        double last_residual = 0.0;
        bool ok = true;
        for (auto it = segs.rbegin(); it != segs.rend() && ok; ++it) {
            IntervalTrace tr;
            tr.slice_start = it->a;
            tr.slice_end = it->b;
            tr.t_start = tree.times[it->a];
            tr.t_end = tree.times[it->b];
            if (it->jumps_only) {
                // Large jumps are taken out of the fixed-point problem and applied directly.
                for (std::size_t s = it->b; s-- > it->a;)
                    for (int j = 0; j < tree.nodes(s); ++j) {
                        Y.at(s, j) = jump_map(eq, tree.param_times[s], tree.dw[s], Y.at(s + 1, j));
                        Z.at(s, j) = Z.at(s + 1, j);
                    }
                traces.push_back(std::move(tr));
                continue;
            }
            conditional_expectation(tree, Y, it->a, it->b);
            for (std::size_t s = it->a; s < it->b; ++s) std::fill(Z.data[s].begin(), Z.data[s].end(), 0.0);
            bool converged = false;
            for (int n = 1; n <= options.max_iter; ++n) {
                auto [Yn, Zn] = picard_step(eq, tree, Y, Z, it->a, it->b);
                const NodeField dY = window_difference(tree, Yn, Y, it->a, it->b);
                const NodeField dZ = window_difference(tree, Zn, Z, it->a, it->b);
                const double r = picard_distance(tree, dY, dZ, it->a, it->b);
                if (!std::isfinite(r)) break;
                tr.residuals.push_back(r);
                tr.iterations = n;
                Y = std::move(Yn);
                Z = std::move(Zn);
                if (r <= options.tol) {
                    converged = true;
                    last_residual = std::max(last_residual, r);
                    break;
                }
            }
            if (!converged) {
                ok = false;
                failures << "  eps_bar=" << eps_bar << " interval [" << tr.t_start << ", " << tr.t_end
                         << "] residuals:";
                for (double r : tr.residuals) failures << ' ' << r;
                failures << '\n';
            }
            traces.push_back(std::move(tr));
        }
        if (ok) {
            std::reverse(traces.begin(), traces.end());
            sol.Y = std::move(Y);
            sol.Z = std::move(Z);
            sol.diag.intervals = std::move(traces);
            sol.diag.final_picard_residual = last_residual;
            sol.diag.eps_bar = eps_bar;
            sol.diag.shrinks = shrink;
            sol.diag.forced_cells = forced;
            break;
        }
        if (shrink >= options.max_shrinks)
            throw ConvergenceError("Picard iteration did not converge after " + std::to_string(shrink) +
                                   " shrinks of eps_bar:\n" + failures.str());
        eps_bar *= 0.5;
    }

    Diagnostics& d = sol.diag;
    d.w_qvar = wq;
    for (int j = 0; j < tree.nodes(S); ++j) d.xi_sup = std::max(d.xi_sup, sol.Y.at(S, j).norm());
    d.max_abs_y = 0.0;
    for (std::size_t s = 0; s <= S; ++s)
        for (int j = 0; j < tree.nodes(s); ++j) d.max_abs_y = std::max(d.max_abs_y, sol.Y.at(s, j).norm());
    d.y_p2 = p2_norm_estimate(tree, sol.Y, p, 0, S, options.exact_norm_depth);
    d.y_p2_upper = p2_norm_upper(tree, sol.Y, 0, S);
    d.z_bmo = bmo_norm_estimate(tree, sol.Z);
    d.apriori = apriori_bound(cf, cg, cT, wq, d.xi_sup, p);
    d.equation_residual = residual_check(eq, sol);
    if (options.check_residual && d.equation_residual > options.residual_factor * options.tol)
        throw ConvergenceError("self-consistency residual " + std::to_string(d.equation_residual) +
                               " exceeds " + std::to_string(options.residual_factor) + " x tol");
    return sol;
}

Solution solve_rbsde(const Problem& problem, const TreeConfig& config, const SolverOptions& options) {
    std::size_t snapped = 0;
    TreeModel tree = build_tree(problem, config, &snapped);
    Solution sol = solve_on_tree(equation_of(problem), tree, problem.p, problem.q, problem.cf(), problem.cg(), options);
    sol.diag.snapped_jumps = snapped;
    return sol;
}

double residual_check(const EquationData& eq, const Solution& sol) {
    const TreeModel& tree = sol.tree;
    const std::size_t S = tree.slices() - 1;
    const double sq = tree.sqrt_dc();
    double worst = 0.0;
    std::vector<Vec> hi(static_cast<std::size_t>(tree.nodes(S))), lo(hi.size());
    for (int j = 0; j < tree.nodes(S); ++j) {
        const Vec d = sol.Y.at(S, j) - eq.xi.eval(tree.brownian_value(S, j));
        hi[static_cast<std::size_t>(j)] = lo[static_cast<std::size_t>(j)] = d;
        worst = std::max(worst, d.cwiseAbs().maxCoeff());
    }
    // Along every path the defects add up; track the componentwise extremes
    // of the accumulated defect from each node to the horizon.
    for (std::size_t s = S; s-- > 0;) {
        const int n = tree.nodes(s);
        std::vector<Vec> nhi(static_cast<std::size_t>(n)), nlo(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const Vec y = sol.Y.at(s, j);
            auto defect = [&](int c, double dm) -> Vec {
                const Vec yn = sol.Y.at(s + 1, c);
                Vec rhs = yn + driver_increment(eq, tree, s, yn);
                if (tree.kinds[s] == StepKind::Brownian)
                    rhs += eq.f.eval(tree.param_times[s], y, sol.Z.at(s, j)) * tree.dc - sol.Z.at(s, j) * dm;
                return y - rhs;
            };
            const std::size_t uj = static_cast<std::size_t>(j);
            if (tree.kinds[s] == StepKind::Brownian) {
                const Vec du = defect(j + 1, sq), dd = defect(j, -sq);
                nhi[uj] = (du + hi[uj + 1]).cwiseMax(dd + hi[uj]);
                nlo[uj] = (du + lo[uj + 1]).cwiseMin(dd + lo[uj]);
            } else {
                const Vec d = defect(j, 0.0);
                nhi[uj] = d + hi[uj];
                nlo[uj] = d + lo[uj];
            }
            worst = std::max({worst, nhi[uj].cwiseAbs().maxCoeff(), nlo[uj].cwiseAbs().maxCoeff()});
        }
        hi.swap(nhi);
        lo.swap(nlo);
    }
    return worst;
}

double residual_check(const Problem& problem, const Solution& sol) { return residual_check(equation_of(problem), sol); }

EnvelopeTable picard_envelope_check(const Problem& problem, const TreeConfig& config, int n_max) {
    const TreeModel tree = build_tree(problem, config);
    const EquationData eq = equation_of(problem);
    const std::size_t S = tree.slices() - 1;
    const int h = eq.xi.dim();
    NodeField Y(tree, h), Z(tree, h);
    for (int j = 0; j < tree.nodes(S); ++j) Y.at(S, j) = eq.xi.eval(tree.brownian_value(S, j));
    conditional_expectation(tree, Y, 0, S);

    EnvelopeTable out;
    for (int n = 0; n < n_max; ++n) {
        auto [Yn, Zn] = picard_step(eq, tree, Y, Z, 0, S);
        const double r = picard_distance(tree, window_difference(tree, Yn, Y, 0, S),
                                         window_difference(tree, Zn, Z, 0, S), 0, S);
        out.residuals.push_back(r);
        Y = std::move(Yn);
        Z = std::move(Zn);
        // Machine-precision fixed point reached; further rows are rounding noise.
        if (r <= 1e-13 * (1.0 + field_max_abs(Y))) break;
    }

    const auto& r = out.residuals;
    std::size_t from = r.size() - 1;
    while (from > 0 && r[from - 1] >= r[from]) --from;
    out.monotone_from = from;
    const bool reached_zero = r.back() <= 1e-13 * (1.0 + field_max_abs(Y));
    out.eventually_monotone = reached_zero || r.size() - from >= 3;

    // Least-squares slope of log r on the positive part of the monotone tail.
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = std::max(from, r.size() / 2); i < r.size(); ++i)
        if (r[i] > 0.0) pts.emplace_back(static_cast<double>(i), std::log(r[i]));
    if (pts.size() < 2) {
        for (std::size_t i = from; i < r.size(); ++i)
            if (r[i] > 0.0 && std::none_of(pts.begin(), pts.end(), [&](auto& q) { return q.first == double(i); }))
                pts.emplace_back(static_cast<double>(i), std::log(r[i]));
        std::sort(pts.begin(), pts.end());
    }
    if (pts.size() >= 2) {
        double mx = 0, my = 0;
        for (auto [x, y] : pts) {
            mx += x;
            my += y;
        }
        mx /= pts.size();
        my /= pts.size();
        double sxy = 0, sxx = 0;
        for (auto [x, y] : pts) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
        out.tail_ratio = std::exp(sxy / sxx);
    } else {
        out.tail_ratio = 0.0;
    }
    return out;
}

}  // namespace roughbsde
