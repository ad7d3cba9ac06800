#pragma once

#include "roughbsde/grid_path.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace roughbsde {

/// Kind of the step from slice s to slice s+1.
enum class StepKind {
    Brownian,  ///< binomial ±√dc move of B, clock advances by dc
    Jump,      ///< instantaneous jump of W, no time, no Brownian move
    Frozen,    ///< time advances, clock and Brownian motion frozen (excursions, flat clock)
};

/// Recombining binomial tree aligned with the solver time grid.
///
/// Slice s carries depth[s] Brownian steps behind it and depth[s]+1 nodes;
/// node j has taken j up-moves, so B(s, j) = (2j − depth[s])·√dc. Jump steps
/// produce two slices with the same time (pre-jump value, then post-jump).
struct TreeModel {
    double dc = 0.0;                 ///< clock increment of every Brownian step
    std::vector<double> times;       ///< solver time axis, size S+1
    std::vector<double> param_times; ///< time argument of f and g at each slice
    std::vector<double> clock;       ///< c at each slice
    std::vector<StepKind> kinds;     ///< size S
    std::vector<Vec> dw;             ///< W increment of each step, size S
    std::vector<int> depth;          ///< Brownian steps before each slice, size S+1

    std::size_t slices() const { return times.size(); }
    std::size_t steps() const { return kinds.size(); }
    int nodes(std::size_t s) const { return depth[s] + 1; }
    int brownian_steps() const { return depth.empty() ? 0 : depth.back(); }
    double sqrt_dc() const;
    double brownian_value(std::size_t s, int j) const;
    /// Probability of node (s, j): C(depth, j)/2^depth.
    double node_probability(std::size_t s, int j) const;
    /// Child node index reached from (s, j) by `up` (ignored off Brownian steps).
    int child(std::size_t s, int j, bool up) const {
        return kinds[s] == StepKind::Brownian && up ? j + 1 : j;
    }
    /// Sequence of node indices along a path given by one bit per Brownian step.
    std::vector<int> path_nodes(const std::vector<std::uint8_t>& ups) const;

    /// W on the solver grid (unique times, càglàd, linear on Brownian/frozen steps).
    GridPath driver_path() const;
    /// Clock on the solver grid.
    GridPath clock_path() const;
    /// First and last slice index at each unique time.
    std::vector<std::pair<std::size_t, std::size_t>> time_slices() const;
};

/// Vector-valued field on tree nodes, row-major per slice.
struct NodeField {
    int dim = 0;
    std::vector<std::vector<double>> data;

    NodeField() = default;
    NodeField(const TreeModel& tree, int dim);

    Eigen::Map<Vec> at(std::size_t s, int j) {
        return Eigen::Map<Vec>(data[s].data() + static_cast<std::size_t>(j) * dim, dim);
    }
    Eigen::Map<const Vec> at(std::size_t s, int j) const {
        return Eigen::Map<const Vec>(data[s].data() + static_cast<std::size_t>(j) * dim, dim);
    }
    bool matches(const TreeModel& tree) const;
};

struct NormEstimate {
    double value = 0.0;
    bool exact = true;
    std::string method;
};

/// ‖Y‖_{p,2;[a,b]} = max over nodes (s, j), a ≤ s ≤ b, of E_{(s,j)}[‖Y‖²_{p;[s,b]}]^{1/2}.
/// Exact by enumerating all subtree paths when the window spans at most
/// `exact_depth` Brownian steps; otherwise a seeded Monte Carlo estimate of the
/// empirical maximum, labelled as an estimate.
NormEstimate p2_norm_estimate(const TreeModel& tree, const NodeField& Y, double p, std::size_t a, std::size_t b,
                              int exact_depth = 14, std::uint64_t seed = 7);
NormEstimate p2_norm_estimate(const TreeModel& tree, const NodeField& Y, double p);

/// Exact upper bound for ‖Y‖_{p,2;[a,b]} via conditional 1-variation moments
/// (‖·‖_p ≤ ‖·‖_1 for p ≥ 1), computed by backward induction.
double p2_norm_upper(const TreeModel& tree, const NodeField& Y, std::size_t a, std::size_t b);

/// ‖Z‖_BMO on [a, b]: max over nodes of E[Σ_{r ≥ s} |Z_r|² Δc_r]^{1/2} (Frobenius).
double bmo_norm_estimate(const TreeModel& tree, const NodeField& Z, std::size_t a, std::size_t b);
double bmo_norm_estimate(const TreeModel& tree, const NodeField& Z);

/// Uniform tree with n Brownian steps on [0, T], no driver.
TreeModel uniform_tree(double horizon, int n, int e = 1);

}  // namespace roughbsde
