#pragma once

#include "roughbsde/grid_path.hpp"

#include <vector>

namespace roughbsde {

enum class Endpoint { Closed, OpenLeft, OpenRight };

/// Ordered values a path visits on a window, including one-sided limits at
/// breakpoints. Consecutive duplicates are dropped; they never change a
/// p-variation sum.
std::vector<Vec> key_points(const GridPath& x, double s, double t, Endpoint conv = Endpoint::Closed);

/// Exact p-variation of a finite sequence of points, O(n²) dynamic programme
/// V(j) = max_{i<j} V(i) + |x_j − x_i|^p. p = +inf gives the oscillation.
double pvar_sequence(const std::vector<Vec>& pts, double p);

/// Same on a flat row-major buffer of n points of dimension dim.
double pvar_flat(const double* data, std::size_t n, std::size_t dim, double p);

/// ‖x‖_{p;[s,t]} with the chosen endpoint convention. OpenLeft drops the jump
/// at s and implements ‖x‖_{p;(s,t]}; OpenRight stops at x(t−).
double p_variation(const GridPath& x, double p, double s, double t, Endpoint conv = Endpoint::Closed);
double p_variation(const GridPath& x, double p);

/// ω(s,t) = ‖x‖^p_{p;[s,t]}.
double control_eval(const GridPath& x, double p, double s, double t);

struct Partition {
    std::vector<double> breakpoints;
    /// Grid cells that alone exceed eps_bar and were accepted as intervals.
    std::size_t forced_cells = 0;
    std::size_t intervals() const { return breakpoints.empty() ? 0 : breakpoints.size() - 1; }
};

/// Greedy left-to-right scan over the merged grid of W and c. Every interval
/// satisfies ‖W‖_{q;(a,b]} ≤ eps_bar and |c_b − c_a| ≤ eps_bar unless a single
/// grid cell already violates it (counted in forced_cells). Jumps at interval
/// boundaries are excluded by the open-left window.
Partition find_partition(const GridPath& W, const GridPath& c, double q, double eps_bar);

/// Upper count 1 + max(|c_T|, ‖W‖_q)/eps_bar used as a diagnostic.
double partition_count_bound(const GridPath& W, const GridPath& c, double q, double eps_bar);

}  // namespace roughbsde
