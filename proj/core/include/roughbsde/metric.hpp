#pragma once

#include "roughbsde/decorated.hpp"

#include <limits>
#include <utility>
#include <vector>

namespace roughbsde {

/// Point of an extended path: time and value (one-sided limits appear as two
/// samples at the same time).
struct PathSample {
    double t;
    Vec x;
};

/// Breakpoints of a caglad-piecewise-linear path in order, each linear piece
/// split into `refine` equal parts.
std::vector<PathSample> path_samples(const GridPath& path, int refine = 1);

/// Position along a sample sequence: i + u with u ∈ [0, 1) is the point a
/// fraction u along the linear piece from sample i to sample i+1. Interior
/// positions are only used on pieces of positive duration.
struct MatchPoint {
    double a = 0.0;
    double b = 0.0;
};

/// Monotone matching between two sample sequences: both positions are
/// nondecreasing, the first pair is (0, 0) and the last (n¹−1, n²−1). The
/// reparameterization λ is the piecewise-linear map through matched times.
struct ReparamMatching {
    std::vector<MatchPoint> pairs;
    double time_distortion = 0.0;  ///< max |σ − ρ| over pairs
    double pvar_diff = 0.0;        ///< ‖d‖_p of the matched differences (sup norm for p = ∞)
    double objective() const { return std::max(time_distortion, pvar_diff); }
};

/// Sample at a fractional position (linear between neighbours).
PathSample sample_at(const std::vector<PathSample>& s, double pos);

/// Fills time_distortion and pvar_diff of a matching.
void evaluate_matching(const std::vector<PathSample>& a, const std::vector<PathSample>& b, double p,
                       ReparamMatching& m);

struct AlphaOptions {
    int beam = 8;    ///< candidates re-evaluated with the exact objective per band family
    int refine = 2;  ///< subdivision of every linear piece
    int bands = 24;  ///< time-distortion thresholds tried in the sweep
    /// With at most this many distinct time distortions every one is tried
    /// and every candidate is evaluated exactly.
    int exhaustive = 600;
};

struct AlphaResult {
    double value = std::numeric_limits<double>::infinity();
    std::vector<double> per_delta;
    ReparamMatching best;
};

/// Upper bound on α_p: for each δ, the best matching found by a bottleneck DP
/// and by a sweep over time-distortion bands with additive surrogates, the
/// exact objective evaluated on the best `beam` candidates; both argument
/// orders are tried. Besides sample pairs the DP may pair a sample with its
/// nearest point on a linear piece of the other path, so ramps of different
/// durations can be matched exactly. Returns the minimum over the schedule.
AlphaResult alpha_p_upper(const DecoratedPath& a, const DecoratedPath& b, double p,
                          const std::vector<double>& delta_schedule, const AlphaOptions& options = {});

/// Exact minimum over all monotone sample-to-sample matchings for one δ
/// (branch and bound). The upper bound searches a superset of these
/// matchings, so it may come out below this value. Throws if a sequence has
/// more than max_points samples.
double alpha_brute(const DecoratedPath& a, const DecoratedPath& b, double p, double delta, int refine = 1,
                   std::size_t max_points = 12);

/// Same two searches directly on sample sequences.
ReparamMatching best_matching_upper(const std::vector<PathSample>& a, const std::vector<PathSample>& b, double p,
                                    const AlphaOptions& options = {});
double brute_matching(const std::vector<PathSample>& a, const std::vector<PathSample>& b, double p,
                      double upper = std::numeric_limits<double>::infinity());

}  // namespace roughbsde
