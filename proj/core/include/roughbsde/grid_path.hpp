#pragma once

#include "roughbsde/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace roughbsde {

/// Interpolation / continuity convention of a GridPath.
///
/// CagladPureJump: constant on (t_i, t_{i+1}] at right_limits[i].
/// ContinuousLinear: linear between grid points, no jumps.
/// CadlagPureJump: constant on [t_i, t_{i+1}) at right_limits[i]; values[i]
///   stores the left limit at t_i.
/// CagladLinear: left-continuous, linear from right_limits[i] to values[i+1]
///   on (t_i, t_{i+1}]; produced by delta-extensions and solver paths.
enum class PathMode { CagladPureJump, ContinuousLinear, CadlagPureJump, CagladLinear };

std::string_view to_string(PathMode mode);
PathMode parse_path_mode(std::string_view text);

/// Sampled path on a finite grid with explicit one-sided limits.
///
/// Immutable after construction. For every grid time three values are
/// available: left(i) = x(t_i-), at(i) = x(t_i), right(i) = x(t_i+).
class GridPath {
public:
    GridPath() = default;
    GridPath(std::vector<double> times, std::vector<Vec> values, std::vector<Vec> right_limits,
             PathMode mode);

    static GridPath continuous(std::vector<double> times, std::vector<Vec> values);
    static GridPath continuous_scalar(std::vector<double> times, const std::vector<double>& values);
    /// Càglàd step path: `levels[i]` is the value on (t_i, t_{i+1}], `start` the value at 0.
    static GridPath caglad_steps(std::vector<double> times, Vec start, std::vector<Vec> levels);
    static GridPath constant(double horizon, const Vec& value);
    static GridPath identity(double horizon);

    std::size_t size() const { return times_.size(); }
    int dim() const { return dim_; }
    double horizon() const { return times_.empty() ? 0.0 : times_.back(); }
    PathMode mode() const { return mode_; }
    const std::vector<double>& times() const { return times_; }
    double time(std::size_t i) const { return times_[i]; }
    const std::vector<Vec>& values() const { return values_; }
    const std::vector<Vec>& right_limits() const { return right_; }

    bool is_cadlag() const { return mode_ == PathMode::CadlagPureJump; }
    bool is_caglad() const { return mode_ != PathMode::CadlagPureJump; }
    bool is_linear() const {
        return mode_ == PathMode::ContinuousLinear || mode_ == PathMode::CagladLinear;
    }

    const Vec& left(std::size_t i) const { return values_[i]; }
    const Vec& at(std::size_t i) const { return is_cadlag() ? right_[i] : values_[i]; }
    const Vec& right(std::size_t i) const { return right_[i]; }

    /// Δ⁺x(t_i) = x(t_i+) − x(t_i).
    Vec jump_plus(std::size_t i) const { return right(i) - at(i); }
    /// Δ⁻x(t_i) = x(t_i) − x(t_i−).
    Vec jump_minus(std::size_t i) const { return at(i) - left(i); }

    Vec eval(double t) const;
    Vec eval_left(double t) const;
    Vec eval_right(double t) const;

    /// Index of grid time t (exact match within 1e-12), or npos.
    std::size_t find_time(double t) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    /// Grid times where the path has a nonzero jump (either side).
    std::vector<double> jump_times() const;

    /// Same path sampled on a superset grid (exact: no information is lost).
    GridPath resampled(const std::vector<double>& grid) const;

    /// Component-wise scaling.
    GridPath scaled(double factor) const;

private:
    std::size_t segment(double t) const;
    void validate() const;

    std::vector<double> times_;
    std::vector<Vec> values_;
    std::vector<Vec> right_;
    PathMode mode_ = PathMode::ContinuousLinear;
    int dim_ = 0;
};

/// Union of two time grids (sorted, merged within 1e-12).
std::vector<double> merge_grids(const std::vector<double>& a, const std::vector<double>& b);

/// a·x + b·y on the merged grid. Both paths must share continuity side.
GridPath combine(const GridPath& x, double a, const GridPath& y, double b);

/// Pointwise (Hadamard, or scalar broadcast) product on the merged grid; only
/// grid values are meaningful for linear segments.
GridPath product(const GridPath& x, const GridPath& y);

}  // namespace roughbsde
