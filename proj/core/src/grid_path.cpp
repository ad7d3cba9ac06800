#include "roughbsde/grid_path.hpp"

#include <algorithm>
#include <cmath>

namespace roughbsde {

namespace {

constexpr double kTimeTol = 1e-12;

bool same_time(double a, double b) {
    return std::abs(a - b) <= kTimeTol * std::max(1.0, std::abs(a));
}

}  // namespace

std::string_view to_string(PathMode mode) {
    switch (mode) {
        case PathMode::CagladPureJump: return "caglad-pure-jump";
        case PathMode::ContinuousLinear: return "continuous-piecewise-linear";
        case PathMode::CadlagPureJump: return "cadlag-pure-jump";
        case PathMode::CagladLinear: return "caglad-piecewise-linear";
    }
    return "unknown";
}

PathMode parse_path_mode(std::string_view text) {
    if (text == "caglad-pure-jump") return PathMode::CagladPureJump;
    if (text == "continuous-piecewise-linear") return PathMode::ContinuousLinear;
    if (text == "cadlag-pure-jump") return PathMode::CadlagPureJump;
    if (text == "caglad-piecewise-linear") return PathMode::CagladLinear;
    throw std::invalid_argument("unknown path mode: " + std::string(text));
}

GridPath::GridPath(std::vector<double> times, std::vector<Vec> values, std::vector<Vec> right_limits,
                   PathMode mode)
    : times_(std::move(times)), values_(std::move(values)), right_(std::move(right_limits)), mode_(mode) {
    if (times_.empty()) throw std::invalid_argument("GridPath: empty grid");
    dim_ = static_cast<int>(values_.front().size());
    validate();
}

void GridPath::validate() const {
    const std::size_t n = times_.size();
    if (values_.size() != n || right_.size() != n)
        throw std::invalid_argument("GridPath: times/values/right_limits size mismatch");
    if (std::abs(times_.front()) > kTimeTol) throw std::invalid_argument("GridPath: first time must be 0");
    for (std::size_t i = 0; i < n; ++i) {
        if (values_[i].size() != dim_ || right_[i].size() != dim_)
            throw std::invalid_argument("GridPath: inconsistent dimension");
        if (!values_[i].allFinite() || !right_[i].allFinite())
            throw std::invalid_argument("GridPath: non-finite entry");
        if (i + 1 < n && !(times_[i + 1] > times_[i]))
            throw std::invalid_argument("GridPath: times must be strictly increasing");
    }
    switch (mode_) {
        case PathMode::ContinuousLinear:
            for (std::size_t i = 0; i < n; ++i)
                if (values_[i] != right_[i])
                    throw std::invalid_argument("GridPath: continuous mode requires right_limits == values");
            break;
        case PathMode::CagladPureJump:
        case PathMode::CadlagPureJump:
            for (std::size_t i = 0; i + 1 < n; ++i)
                if (values_[i + 1] != right_[i])
                    throw std::invalid_argument("GridPath: pure-jump path must be constant between grid points");
            break;
        case PathMode::CagladLinear:
            break;
    }
    if (is_caglad() && right_.back() != values_.back())
        throw std::invalid_argument("GridPath: caglad path cannot jump at the horizon");
    if (is_cadlag() && right_.front() != values_.front())
        throw std::invalid_argument("GridPath: cadlag path cannot jump at time 0");
}

GridPath GridPath::continuous(std::vector<double> times, std::vector<Vec> values) {
    std::vector<Vec> right = values;
    return GridPath(std::move(times), std::move(values), std::move(right), PathMode::ContinuousLinear);
}

GridPath GridPath::continuous_scalar(std::vector<double> times, const std::vector<double>& values) {
    std::vector<Vec> v;
    v.reserve(values.size());
    for (double x : values) v.push_back(scalar_vec(x));
    return continuous(std::move(times), std::move(v));
}

GridPath GridPath::caglad_steps(std::vector<double> times, Vec start, std::vector<Vec> levels) {
    const std::size_t n = times.size();
    if (levels.size() + 1 != n) throw std::invalid_argument("caglad_steps: need one level per grid cell");
    std::vector<Vec> values(n), right(n);
    values[0] = std::move(start);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        right[i] = levels[i];
        values[i + 1] = levels[i];
    }
    right[n - 1] = values[n - 1];
    return GridPath(std::move(times), std::move(values), std::move(right), PathMode::CagladPureJump);
}

GridPath GridPath::constant(double horizon, const Vec& value) {
    return continuous({0.0, horizon}, {value, value});
}

GridPath GridPath::identity(double horizon) {
    return continuous_scalar({0.0, horizon}, {0.0, horizon});
}

std::size_t GridPath::find_time(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t - kTimeTol * std::max(1.0, std::abs(t)));
    if (it != times_.end() && same_time(*it, t)) return static_cast<std::size_t>(it - times_.begin());
    return npos;
}

std::size_t GridPath::segment(double t) const {
    if (t < -kTimeTol || t > horizon() * (1 + kTimeTol) + kTimeTol)
        throw std::out_of_range("GridPath: time outside [0, T]");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - times_.begin());
    return k == 0 ? 0 : k - 1;
}

Vec GridPath::eval(double t) const {
    std::size_t i = find_time(t);
    if (i != npos) return at(i);
    return eval_right(t);
}

Vec GridPath::eval_left(double t) const {
    std::size_t i = find_time(t);
    if (i != npos) return left(i);
    return eval_right(t);
}

Vec GridPath::eval_right(double t) const {
    std::size_t i = find_time(t);
    if (i != npos) return right(i);
    std::size_t k = segment(t);
    if (k + 1 >= times_.size()) return right(k);
    if (!is_linear()) return right(k);
    double w = (t - times_[k]) / (times_[k + 1] - times_[k]);
    return (1.0 - w) * right(k) + w * left(k + 1);
}

std::vector<double> GridPath::jump_times() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i)
        if (right_[i] != values_[i]) out.push_back(times_[i]);
    return out;
}

GridPath GridPath::resampled(const std::vector<double>& grid) const {
    std::vector<Vec> values, right;
    values.reserve(grid.size());
    right.reserve(grid.size());
    for (double t : grid) {
        values.push_back(is_cadlag() ? eval_left(t) : eval(t));
        right.push_back(eval_right(t));
    }
    return GridPath(grid, std::move(values), std::move(right), mode_);
}

GridPath GridPath::scaled(double factor) const {
    std::vector<Vec> values, right;
    for (std::size_t i = 0; i < size(); ++i) {
        values.push_back(factor * values_[i]);
        right.push_back(factor * right_[i]);
    }
    return GridPath(times_, std::move(values), std::move(right), mode_);
}

std::vector<double> merge_grids(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> all;
    all.reserve(a.size() + b.size());
    all.insert(all.end(), a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    std::vector<double> out;
    for (double t : all)
        if (out.empty() || !same_time(out.back(), t)) out.push_back(t);
    return out;
}

namespace {

PathMode joint_mode(const GridPath& x, const GridPath& y) {
    const PathMode a = x.mode(), b = y.mode();
    if (a == PathMode::CadlagPureJump || b == PathMode::CadlagPureJump) {
        if (a == b) return PathMode::CadlagPureJump;
        throw std::invalid_argument("cannot combine cadlag and caglad/linear paths");
    }
    if (a == PathMode::ContinuousLinear && b == PathMode::ContinuousLinear) return PathMode::ContinuousLinear;
    if (a == PathMode::CagladPureJump && b == PathMode::CagladPureJump) return PathMode::CagladPureJump;
    return PathMode::CagladLinear;
}

void check_horizons(const GridPath& x, const GridPath& y) {
    if (!same_time(x.horizon(), y.horizon())) throw std::invalid_argument("paths have different horizons");
}

Vec mul(const Vec& a, const Vec& b) {
    if (a.size() == 1) return a(0) * b;
    if (b.size() == 1) return b(0) * a;
    return a.cwiseProduct(b);
}

}  // namespace

GridPath combine(const GridPath& x, double a, const GridPath& y, double b) {
    check_horizons(x, y);
    if (x.dim() != y.dim()) throw std::invalid_argument("combine: dimension mismatch");
    const PathMode mode = joint_mode(x, y);
    std::vector<double> grid = merge_grids(x.times(), y.times());
    std::vector<Vec> values, right;
    for (double t : grid) {
        if (mode == PathMode::CadlagPureJump)
            values.push_back(a * x.eval_left(t) + b * y.eval_left(t));
        else
            values.push_back(a * x.eval(t) + b * y.eval(t));
        right.push_back(a * x.eval_right(t) + b * y.eval_right(t));
    }
    return GridPath(std::move(grid), std::move(values), std::move(right), mode);
}

GridPath product(const GridPath& x, const GridPath& y) {
    check_horizons(x, y);
    if (x.dim() != y.dim() && x.dim() != 1 && y.dim() != 1)
        throw std::invalid_argument("product: dimension mismatch");
    PathMode mode = joint_mode(x, y);
    std::vector<double> grid = merge_grids(x.times(), y.times());
    std::vector<Vec> values, right;
    for (double t : grid) {
        if (mode == PathMode::CadlagPureJump)
            values.push_back(mul(x.eval_left(t), y.eval_left(t)));
        else
            values.push_back(mul(x.eval(t), y.eval(t)));
        right.push_back(mul(x.eval_right(t), y.eval_right(t)));
    }
    return GridPath(std::move(grid), std::move(values), std::move(right), mode);
}

}  // namespace roughbsde
