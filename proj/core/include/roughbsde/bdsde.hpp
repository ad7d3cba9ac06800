#pragma once

#include "roughbsde/drivers.hpp"
#include "roughbsde/rbsde.hpp"

#include <cstdint>
#include <vector>

namespace roughbsde {

/// Annealed run: the template problem's W is replaced by a sampled driver.
struct BdsdeRun {
    Problem problem;
    DriverSpec sampler;
    int n_outer = 100;
    std::uint64_t base_seed = 1;
    /// Samples with ‖L‖_q above this bound are rejected and redrawn; ≤ 0 disables.
    double q_bound = 0.0;
    TreeConfig tree;
    SolverOptions options;
};

struct BdsdeSample {
    std::size_t index = 0;
    std::uint64_t seed = 0;  ///< seed of the accepted draw
    int attempts = 1;
    double y0 = 0.0;         ///< first component of Y at the root
    double z_energy = 0.0;   ///< E∫|Z|² dc on the tree
    double w_qvar = 0.0;
    std::size_t jumps = 0;
};

struct BdsdeAggregate {
    std::size_t n = 0;
    double mean_y0 = 0.0;
    double std_error = 0.0;
    double q05 = 0.0;
    double q50 = 0.0;
    double q95 = 0.0;
    double mean_z_energy = 0.0;
};

struct BdsdeResult {
    std::vector<BdsdeSample> samples;
    BdsdeAggregate aggregate;
    std::size_t rejections = 0;
};

/// Seed of the k-th draw of sample i: base_seed + i first, then a mixed seed per retry.
std::uint64_t sample_seed(std::uint64_t base_seed, std::size_t index, int attempt);

/// E∫|Z|² dc by exact tree expectation.
double z_energy(const Solution& sol);

/// Quenched solve per sampled path, aggregated in index order.
BdsdeResult solve_bdsde(const BdsdeRun& run);

/// Aggregate statistics from per-sample rows (fixed summation order).
BdsdeAggregate aggregate_samples(const std::vector<BdsdeSample>& samples);

}  // namespace roughbsde
