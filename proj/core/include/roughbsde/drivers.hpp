#pragma once

#include "roughbsde/grid_path.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace roughbsde {

enum class DriverKind { Step, Zigzag, Fbm, CompoundPoisson, LevyTruncated, TwoPoint, Sum };

std::string_view to_string(DriverKind kind);
DriverKind parse_driver_kind(std::string_view text);

/// Scalar rough driver description. Random kinds are deterministic given seed.
struct DriverSpec {
    DriverKind kind = DriverKind::Step;
    double horizon = 1.0;
    std::uint64_t seed = 0;
    double declared_q = 1.0;

    // step: jumps of the given sizes at the given times
    std::vector<double> jump_times;
    std::vector<double> jump_sizes;
    // zigzag: values at equally spaced times (piecewise linear)
    std::vector<double> zigzag_values;
    // fbm
    double hurst = 0.75;
    int n_samples = 256;
    double scale = 1.0;
    // compound-poisson: Poisson(rate·T) jumps, normal sizes
    double rate = 1.0;
    double jump_mean = 0.0;
    double jump_std = 1.0;
    // levy-truncated: symmetric jumps with |x| ≥ truncation, Lévy density
    // levy_scale·β|x|^{−1−β}/2 per side
    double beta = 1.0;
    double truncation = 0.1;
    double levy_scale = 1.0;
    // two-point: a jump of ±two_point_size at two_point_time; antithetic
    // alternates the sign with the seed's parity instead of drawing it
    double two_point_size = 0.5;
    double two_point_time = 0.5;
    bool antithetic = false;
    // sum: independent parts (part i uses seed + i)
    std::vector<DriverSpec> parts;

    /// Throws on inconsistent parameters (H, β, declared q per kind).
    void validate() const;
};

struct DriverReport {
    std::size_t jumps = 0;
    double jitter = 0.0;  ///< diagonal jitter added to the fBm covariance
};

/// Exact fBm on a uniform grid by Cholesky factorization of
/// ½(s^{2H} + t^{2H} − |t−s|^{2H}); the factor is computed once.
class FbmSampler {
public:
    FbmSampler(double hurst, int n, double horizon);
    GridPath sample(std::mt19937_64& rng, double scale = 1.0) const;
    double jitter() const { return jitter_; }
    int size() const { return n_; }

private:
    double hurst_;
    int n_;
    double horizon_;
    double jitter_ = 0.0;
    Mat factor_;
};

/// Scalar càglàd pure-jump path on [0, T] from (time, size) pairs, W(0) = 0.
GridPath pure_jump(double T, std::vector<std::pair<double, double>> jumps);

GridPath generate(const DriverSpec& spec, DriverReport* report = nullptr);

/// Piecewise-linear interpolation of W at the mesh points k·mesh (and T).
/// A jump at a mesh point becomes a ramp over the following mesh cell.
GridPath wong_zakai(const GridPath& W, double mesh);

}  // namespace roughbsde
