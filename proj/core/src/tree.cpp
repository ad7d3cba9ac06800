#include "roughbsde/tree.hpp"

#include "roughbsde/pvariation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace roughbsde {

double TreeModel::sqrt_dc() const { return std::sqrt(dc); }

double TreeModel::brownian_value(std::size_t s, int j) const { return (2.0 * j - depth[s]) * sqrt_dc(); }

double TreeModel::node_probability(std::size_t s, int j) const {
    const int n = depth[s];
    if (j < 0 || j > n) return 0.0;
    const double logp = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) - n * std::log(2.0);
    return std::exp(logp);
}

std::vector<int> TreeModel::path_nodes(const std::vector<std::uint8_t>& ups) const {
    if (static_cast<int>(ups.size()) != brownian_steps())
        throw std::invalid_argument("path_nodes: need one bit per Brownian step");
    std::vector<int> out(slices(), 0);
    int j = 0;
    std::size_t b = 0;
    for (std::size_t s = 0; s < steps(); ++s) {
        if (kinds[s] == StepKind::Brownian) j = child(s, j, ups[b++] != 0);
        out[s + 1] = j;
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> TreeModel::time_slices() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t s = 0; s < slices(); ++s) {
        if (!out.empty() && times[s] == times[out.back().first])
            out.back().second = s;
        else
            out.emplace_back(s, s);
    }
    return out;
}

GridPath TreeModel::driver_path() const {
    const int e = dw.empty() ? 1 : static_cast<int>(dw.front().size());
    std::vector<Vec> cum(slices(), Vec::Zero(e));
    for (std::size_t s = 0; s < steps(); ++s) cum[s + 1] = cum[s] + dw[s];
    std::vector<double> t;
    std::vector<Vec> values, right;
    for (auto [first, last] : time_slices()) {
        t.push_back(times[first]);
        values.push_back(cum[first]);
        right.push_back(cum[last]);
    }
    right.back() = values.back();
    return GridPath(std::move(t), std::move(values), std::move(right), PathMode::CagladLinear);
}

GridPath TreeModel::clock_path() const {
    std::vector<double> t, c;
    for (auto [first, last] : time_slices()) {
        (void)last;
        t.push_back(times[first]);
        c.push_back(clock[first]);
    }
    return GridPath::continuous_scalar(std::move(t), c);
}

NodeField::NodeField(const TreeModel& tree, int d) : dim(d) {
    data.resize(tree.slices());
    for (std::size_t s = 0; s < tree.slices(); ++s)
        data[s].assign(static_cast<std::size_t>(tree.nodes(s)) * static_cast<std::size_t>(d), 0.0);
}

bool NodeField::matches(const TreeModel& tree) const {
    if (data.size() != tree.slices()) return false;
    for (std::size_t s = 0; s < tree.slices(); ++s)
        if (data[s].size() != static_cast<std::size_t>(tree.nodes(s)) * static_cast<std::size_t>(dim)) return false;
    return true;
}

namespace {

void check_window(const TreeModel& tree, const NodeField& f, std::size_t a, std::size_t b) {
    if (!f.matches(tree)) throw std::invalid_argument("node field does not match the tree");
    if (a > b || b >= tree.slices()) throw std::out_of_range("norm window outside the tree");
}

inline double powp(double d, double p) { return p == 2.0 ? d * d : std::pow(d, p); }

/// Depth-first enumeration of all paths from (s, j) to slice b, carrying the
/// p-variation DP vector along the path.
struct PathEnumerator {
    const TreeModel& tree;
    const NodeField& Y;
    double p;
    std::size_t b;
    std::vector<double> pts;
    std::vector<double> V;
    double sum = 0.0;

    void push(std::size_t s, int j) {
        const auto y = Y.at(s, j);
        const std::size_t n = V.size();
        const std::size_t d = static_cast<std::size_t>(Y.dim);
        for (std::size_t k = 0; k < d; ++k) pts.push_back(y(static_cast<Eigen::Index>(k)));
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double diff = pts[n * d + k] - pts[i * d + k];
                acc += diff * diff;
            }
            best = std::max(best, V[i] + powp(std::sqrt(acc), p));
        }
        V.push_back(best);
    }
    void pop() {
        V.pop_back();
        pts.resize(pts.size() - static_cast<std::size_t>(Y.dim));
    }
    void walk(std::size_t s, int j, double weight) {
        push(s, j);
        if (s == b) {
            sum += weight * std::pow(V.back(), 2.0 / p);
        } else if (tree.kinds[s] == StepKind::Brownian) {
            walk(s + 1, j + 1, 0.5 * weight);
            walk(s + 1, j, 0.5 * weight);
        } else {
            walk(s + 1, j, weight);
        }
        pop();
    }
};

}  // namespace

NormEstimate p2_norm_estimate(const TreeModel& tree, const NodeField& Y, double p, std::size_t a, std::size_t b,
                              int exact_depth, std::uint64_t seed) {
    check_window(tree, Y, a, b);
    if (p < 1.0) throw std::invalid_argument("p2_norm_estimate: p must be >= 1");
    NormEstimate out;
    const int span = tree.depth[b] - tree.depth[a];
    if (span <= exact_depth) {
        out.method = "exact-enumeration";
        double best = 0.0;
        for (std::size_t s = a; s <= b; ++s) {
            for (int j = 0; j < tree.nodes(s); ++j) {
                PathEnumerator en{tree, Y, p, b, {}, {}, 0.0};
                en.walk(s, j, 1.0);
                best = std::max(best, en.sum);
            }
        }
        out.value = std::sqrt(best);
        return out;
    }
    out.exact = false;
    out.method = "monte-carlo-empirical-max";
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    const std::size_t slice_stride = std::max<std::size_t>(1, (b - a) / 8);
    const int samples = 32;
    double best = 0.0;
    std::vector<Vec> pts;
    for (std::size_t s = a; s <= b; s += slice_stride) {
        const int node_stride = std::max(1, tree.nodes(s) / 4);
        for (int j = 0; j < tree.nodes(s); j += node_stride) {
            double acc = 0.0;
            for (int k = 0; k < samples; ++k) {
                pts.clear();
                int node = j;
                for (std::size_t r = s; r <= b; ++r) {
                    pts.emplace_back(Y.at(r, node));
                    if (r < b) node = tree.child(r, node, coin(rng));
                }
                const double v = pvar_sequence(pts, p);
                acc += v * v;
            }
            best = std::max(best, acc / samples);
        }
    }
    out.value = std::sqrt(best);
    return out;
}

NormEstimate p2_norm_estimate(const TreeModel& tree, const NodeField& Y, double p) {
    return p2_norm_estimate(tree, Y, p, 0, tree.slices() - 1);
}

double p2_norm_upper(const TreeModel& tree, const NodeField& Y, std::size_t a, std::size_t b) {
    check_window(tree, Y, a, b);
    std::vector<double> m1(static_cast<std::size_t>(tree.nodes(b)), 0.0), m2 = m1;
    double best = 0.0;
    for (std::size_t s = b; s-- > a;) {
        const int n = tree.nodes(s);
        std::vector<double> n1(static_cast<std::size_t>(n)), n2(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const auto y = Y.at(s, j);
            auto contrib = [&](int c, double w, double& e1, double& e2) {
                const double d = (Y.at(s + 1, c) - y).norm();
                const double c1 = m1[static_cast<std::size_t>(c)], c2 = m2[static_cast<std::size_t>(c)];
                e1 += w * (d + c1);
                e2 += w * (d * d + 2.0 * d * c1 + c2);
            };
            double e1 = 0.0, e2 = 0.0;
            if (tree.kinds[s] == StepKind::Brownian) {
                contrib(j + 1, 0.5, e1, e2);
                contrib(j, 0.5, e1, e2);
            } else {
                contrib(j, 1.0, e1, e2);
            }
            n1[static_cast<std::size_t>(j)] = e1;
            n2[static_cast<std::size_t>(j)] = e2;
            best = std::max(best, e2);
        }
        m1.swap(n1);
        m2.swap(n2);
    }
    return std::sqrt(best);
}

double bmo_norm_estimate(const TreeModel& tree, const NodeField& Z, std::size_t a, std::size_t b) {
    check_window(tree, Z, a, b);
    std::vector<double> A(static_cast<std::size_t>(tree.nodes(b)), 0.0);
    double best = 0.0;
    for (std::size_t s = b; s-- > a;) {
        const int n = tree.nodes(s);
        std::vector<double> next(static_cast<std::size_t>(n));
        const bool brownian = tree.kinds[s] == StepKind::Brownian;
        for (int j = 0; j < n; ++j) {
            const double z2 = Z.at(s, j).squaredNorm();
            double v = brownian ? z2 * tree.dc + 0.5 * (A[static_cast<std::size_t>(j) + 1] + A[static_cast<std::size_t>(j)])
                                : A[static_cast<std::size_t>(j)];
            next[static_cast<std::size_t>(j)] = v;
            best = std::max(best, v);
        }
        A.swap(next);
    }
    return std::sqrt(best);
}

double bmo_norm_estimate(const TreeModel& tree, const NodeField& Z) {
    return bmo_norm_estimate(tree, Z, 0, tree.slices() - 1);
}

TreeModel uniform_tree(double horizon, int n, int e) {
    if (n < 1 || !(horizon > 0.0)) throw std::invalid_argument("uniform_tree: need n >= 1 and T > 0");
    TreeModel t;
    t.dc = horizon / n;
    for (int k = 0; k <= n; ++k) {
        const double time = k == n ? horizon : k * t.dc;
        t.times.push_back(time);
        t.param_times.push_back(time);
        t.clock.push_back(time);
        t.depth.push_back(k);
    }
    t.kinds.assign(static_cast<std::size_t>(n), StepKind::Brownian);
    t.dw.assign(static_cast<std::size_t>(n), Vec::Zero(e));
    return t;
}

}  // namespace roughbsde
