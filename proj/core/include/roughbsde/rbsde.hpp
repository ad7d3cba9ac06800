#pragma once

#include "roughbsde/grid_path.hpp"
#include "roughbsde/tree.hpp"
#include "roughbsde/vector_field.hpp"

#include <string>
#include <vector>

namespace roughbsde {

enum class JumpMode { Forward, Marcus };

std::string_view to_string(JumpMode mode);
JumpMode parse_jump_mode(std::string_view text);

/// Y_t = ξ + ∫_t^T f(r, Y_r, Z_r) dc_r + ∫_t^T g_r(Y_r) (⋄) dW_r − ∫_t^T Z_r dB_{c_r}.
struct Problem {
    double horizon = 1.0;
    Terminal xi = Terminal::constant(scalar_vec(0.0));
    Generator f;
    VectorField g = VectorField::zero(1, 1);
    GridPath W = GridPath::constant(1.0, scalar_vec(0.0));
    /// Continuous nondecreasing clock with c(0) = 0; empty means identity.
    GridPath clock;
    JumpMode mode = JumpMode::Marcus;
    double p = 3.0;
    double q = 1.0;
    /// Declared bounds; negative means "use the family bound".
    double declared_cf = -1.0;
    double declared_cg = -1.0;

    double cf() const;
    double cg() const;
    GridPath clock_or_identity() const;
};

/// Throws AssumptionError unless the standing assumptions hold for the
/// declared bounds (exponents, dimensions, continuity sides, bounds).
void validate_problem(const Problem& problem);

struct TreeConfig {
    int steps = 200;
    /// Jumps of W off the uniform grid are moved to the nearest slice if they
    /// are within this distance; negative means half a step.
    double snap_tolerance = -1.0;
    /// Frozen substeps used for each excursion of a time-stretched problem.
    int excursion_substeps = 4;
};

struct SolverOptions {
    double tol = 1e-8;
    int max_iter = 50;
    int max_shrinks = 4;
    /// Throw if the self-consistency residual exceeds residual_factor·tol.
    double residual_factor = 10.0;
    bool check_residual = true;
    /// p-variation norms over windows spanning more Brownian steps than this
    /// are Monte Carlo estimates.
    int exact_norm_depth = 12;
};

struct IntervalTrace {
    double t_start = 0.0;
    double t_end = 0.0;
    std::size_t slice_start = 0;
    std::size_t slice_end = 0;
    int iterations = 0;
    std::vector<double> residuals;
};

struct Diagnostics {
    NormEstimate y_p2;
    double y_p2_upper = 0.0;
    double z_bmo = 0.0;
    std::vector<IntervalTrace> intervals;
    double final_picard_residual = 0.0;
    double apriori = 0.0;
    double equation_residual = 0.0;
    double eps_bar = 0.0;
    int shrinks = 0;
    std::size_t snapped_jumps = 0;
    std::size_t forced_cells = 0;
    double max_abs_y = 0.0;
    double xi_sup = 0.0;
    double w_qvar = 0.0;
};

struct Solution {
    TreeModel tree;
    NodeField Y;
    NodeField Z;
    Diagnostics diag;

    Vec y0() const { return Y.at(0, 0); }
    /// Z at the first Brownian slice reached from the root.
    Vec z0() const;
    /// Y along one tree path (one bit per Brownian step) as a càglàd path on
    /// the unique slice times; jump slices become (value, right limit) pairs.
    GridPath path(const std::vector<std::uint8_t>& ups) const;
};

/// Coefficients of the backward equation as seen by the tree solver.
struct EquationData {
    Terminal xi;
    Generator f;
    VectorField g;
    JumpMode mode = JumpMode::Marcus;
};

EquationData equation_of(const Problem& problem);

/// Solver grid for a problem: uniform in clock time, frozen steps on flat
/// pieces of the clock, one jump step per jump of W (snapped to the grid).
TreeModel build_tree(const Problem& problem, const TreeConfig& config, std::size_t* snapped = nullptr);

/// One application of the fixed-point map on slices [a, b]: Y_prev and Z_prev
/// hold the previous iterate (Y_prev at slice b is the terminal value).
/// Returns (Ȳ, Z̄) with the same layout; slices outside [a, b] are copied.
std::pair<NodeField, NodeField> picard_step(const EquationData& eq, const TreeModel& tree, const NodeField& Y_prev,
                                            const NodeField& Z_prev, std::size_t a, std::size_t b);

/// ⦀ΔY, ΔZ⦀ on [a, b]: exact conditional 1-variation bound for ΔY plus the
/// BMO norm of ΔZ. Dominates the ‖·‖_{p,2} + ‖·‖_BMO norm for every p ≥ 1.
double picard_distance(const TreeModel& tree, const NodeField& dY, const NodeField& dZ, std::size_t a,
                       std::size_t b);

/// Global solve: ε̄-partition, right-to-left Picard on each interval, jump maps
/// applied by hand at interval boundaries.
Solution solve_rbsde(const Problem& problem, const TreeConfig& config = {}, const SolverOptions& options = {});

/// Solve on a prepared tree (used by the time-stretched solver).
Solution solve_on_tree(const EquationData& eq, const TreeModel& tree, double p, double q, double cf, double cg,
                       const SolverOptions& options);

/// Self-consistency defect: sup over nodes and tree paths of the accumulated
/// one-step defect Y_s − [Y_{s+1} + f Δc + G(Y_{s+1}) − Z_s ΔM].
double residual_check(const EquationData& eq, const Solution& sol);
double residual_check(const Problem& problem, const Solution& sol);

/// A priori bound on sup|Y|; see the implementation notes for the pinned constants.
double apriori_bound(double cf, double cg, double cT, double wq, double xi_inf, double p);

/// ε̄ = min(0.25/(1+C_f), 0.25/(1+C_g), 0.2/(1+‖W‖_q)).
double default_eps_bar(double cf, double cg, double wq);

struct EnvelopeTable {
    std::vector<double> residuals;  ///< r_n = ⦀Y^{n+1} − Y^n, Z^{n+1} − Z^n⦀ on [0, T]
    double tail_ratio = 0.0;        ///< fitted geometric ratio on the tail
    bool eventually_monotone = false;
    std::size_t monotone_from = 0;
};

/// Global Picard iteration from Y⁰ = E_t[ξ], Z⁰ = 0 on the whole horizon.
EnvelopeTable picard_envelope_check(const Problem& problem, const TreeConfig& config, int n_max);

struct StretchResult {
    Solution extended;
    Solution retracted;
    Solution direct;
    std::vector<std::size_t> slice_map;  ///< direct slice → extended slice
    double delta = 0.0;
    double max_difference = 0.0;         ///< max |Y_direct − Y_retracted| over nodes
};

/// Solves the continuous problem on [0, T+δ] obtained by inserting fictitious
/// time at the jumps of W (ȷ-extension for Marcus, ι-extension for forward),
/// with dc = 0 and dB = 0 on excursions, and retracts it through τ^δ.
StretchResult time_stretched_solve(const Problem& problem, double delta, const TreeConfig& config = {},
                                   const SolverOptions& options = {});

}  // namespace roughbsde
