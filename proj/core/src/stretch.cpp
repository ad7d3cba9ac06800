#include "roughbsde/decorated.hpp"
#include "roughbsde/rbsde.hpp"

#include <algorithm>
#include <cmath>

namespace roughbsde {

namespace {

struct StretchedTree {
    TreeModel tree;
    std::vector<std::size_t> slice_map;
};

/// Inserts fictitious time r_k at the k-th jump step of a direct tree. Marcus
/// jumps become `substeps` frozen steps along ΔW/substeps (ȷ-excursion of W),
/// forward jumps stay jumps followed by a frozen pause (ι-excursion). Without
/// jumps a frozen tail of length δ is appended.
StretchedTree stretch_tree(const TreeModel& direct, JumpMode mode, double delta, int substeps) {
    if (substeps < 1) throw std::invalid_argument("stretch: excursion substeps must be >= 1");
    std::size_t m = 0;
    for (StepKind k : direct.kinds)
        if (k == StepKind::Jump) ++m;
    const std::vector<double> r = tau_weights(m, delta);

    StretchedTree out;
    TreeModel& t = out.tree;
    t.dc = direct.dc;
    double offset = 0.0;
    auto push = [&](std::size_t s, double time) {
        t.times.push_back(time);
        t.param_times.push_back(direct.param_times[s]);
        t.clock.push_back(direct.clock[s]);
        t.depth.push_back(direct.depth[s]);
    };
    push(0, direct.times[0]);
    out.slice_map.push_back(0);
    std::size_t k = 0;
    for (std::size_t s = 0; s < direct.steps(); ++s) {
        if (direct.kinds[s] != StepKind::Jump) {
            t.kinds.push_back(direct.kinds[s]);
            t.dw.push_back(direct.dw[s]);
            push(s + 1, direct.times[s + 1] + offset);
            out.slice_map.push_back(t.slices() - 1);
            continue;
        }
        const double start = direct.times[s] + offset;
        const double rk = r[k++];
        if (mode == JumpMode::Marcus) {
            for (int i = 1; i <= substeps; ++i) {
                t.kinds.push_back(StepKind::Frozen);
                t.dw.push_back(direct.dw[s] / substeps);
                push(s, i == substeps ? start + rk : start + rk * i / substeps);
            }
        } else {
            t.kinds.push_back(StepKind::Jump);
            t.dw.push_back(direct.dw[s]);
            push(s, start);
            t.kinds.push_back(StepKind::Frozen);
            t.dw.push_back(Vec::Zero(direct.dw[s].size()));
            push(s, start + rk);
        }
        offset += rk;
        out.slice_map.push_back(t.slices() - 1);
    }
    if (m == 0) {
        const std::size_t S = direct.slices() - 1;
        t.kinds.push_back(StepKind::Frozen);
        t.dw.push_back(Vec::Zero(direct.dw.empty() ? 1 : direct.dw.front().size()));
        push(S, direct.times[S] + delta);
    }
    return out;
}

}  // namespace

StretchResult time_stretched_solve(const Problem& problem, double delta, const TreeConfig& config,
                                   const SolverOptions& options) {
    if (!(delta > 0.0)) throw std::invalid_argument("time_stretched_solve: delta must be positive");
    StretchResult out;
    out.delta = delta;
    out.direct = solve_rbsde(problem, config, options);

    StretchedTree st = stretch_tree(out.direct.tree, problem.mode, delta, config.excursion_substeps);
    EquationData eq = equation_of(problem);
    // The stretched driver is continuous at Marcus jumps; only ι-pauses keep a
    // jump, which is of forward type.
    eq.mode = JumpMode::Forward;
    out.extended = solve_on_tree(eq, st.tree, problem.p, problem.q, problem.cf(), problem.cg(), options);
    out.slice_map = st.slice_map;

    const TreeModel& direct = out.direct.tree;
    const int h = out.direct.Y.dim;
    Solution ret{direct, NodeField(direct, h), NodeField(direct, h), out.extended.diag};
    double diff = 0.0;
    for (std::size_t s = 0; s < direct.slices(); ++s) {
        const std::size_t e = st.slice_map[s];
        for (int j = 0; j < direct.nodes(s); ++j) {
            ret.Y.at(s, j) = out.extended.Y.at(e, j);
            ret.Z.at(s, j) = out.extended.Z.at(e, j);
            diff = std::max(diff, (ret.Y.at(s, j) - out.direct.Y.at(s, j)).cwiseAbs().maxCoeff());
        }
    }
    out.retracted = std::move(ret);
    out.max_difference = diff;
    return out;
}

}  // namespace roughbsde
