#include "roughbsde/pvariation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace roughbsde {

namespace {

void push_unique(std::vector<Vec>& pts, const Vec& v) {
    if (pts.empty() || pts.back() != v) pts.push_back(v);
}

inline double powp(double d, double p) {
    if (p == 1.0) return d;
    if (p == 2.0) return d * d;
    return std::pow(d, p);
}

}  // namespace

std::vector<Vec> key_points(const GridPath& x, double s, double t, Endpoint conv) {
    if (s > t) throw std::invalid_argument("key_points: s > t");
    std::vector<Vec> pts;
    if (conv == Endpoint::OpenLeft) {
        push_unique(pts, x.eval_right(s));
    } else {
        push_unique(pts, x.eval(s));
        if (t > s) push_unique(pts, x.eval_right(s));
    }
    if (t > s) {
        const auto& ts = x.times();
        auto it = std::upper_bound(ts.begin(), ts.end(), s);
        for (; it != ts.end() && *it < t; ++it) {
            std::size_t i = static_cast<std::size_t>(it - ts.begin());
            if (x.find_time(t) == i || x.find_time(s) == i) continue;
            push_unique(pts, x.left(i));
            push_unique(pts, x.at(i));
            push_unique(pts, x.right(i));
        }
        push_unique(pts, x.eval_left(t));
        if (conv != Endpoint::OpenRight) push_unique(pts, x.eval(t));
    }
    return pts;
}

double pvar_flat(const double* data, std::size_t n, std::size_t dim, double p) {
    if (p < 1.0) throw std::invalid_argument("p-variation requires p >= 1");
    if (n < 2) return 0.0;
    auto dist = [&](std::size_t i, std::size_t j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            double d = data[j * dim + k] - data[i * dim + k];
            acc += d * d;
        }
        return std::sqrt(acc);
    };
    if (std::isinf(p)) {
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) best = std::max(best, dist(i, j));
        return best;
    }
    std::vector<double> V(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
        double best = 0.0;
        for (std::size_t i = 0; i < j; ++i) best = std::max(best, V[i] + powp(dist(i, j), p));
        V[j] = best;
    }
    return p == 1.0 ? V[n - 1] : std::pow(V[n - 1], 1.0 / p);
}

double pvar_sequence(const std::vector<Vec>& pts, double p) {
    if (pts.empty()) return 0.0;
    const std::size_t dim = static_cast<std::size_t>(pts.front().size());
    std::vector<double> flat(pts.size() * dim);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t k = 0; k < dim; ++k) flat[i * dim + k] = pts[i](static_cast<Eigen::Index>(k));
    return pvar_flat(flat.data(), pts.size(), dim, p);
}

double p_variation(const GridPath& x, double p, double s, double t, Endpoint conv) {
    if (p < 1.0) throw std::invalid_argument("p-variation requires p >= 1");
    if (s < 0.0 || t > x.horizon() * (1 + 1e-12) + 1e-12 || s > t)
        throw std::out_of_range("p_variation: window outside [0, T]");
    return pvar_sequence(key_points(x, s, t, conv), p);
}

double p_variation(const GridPath& x, double p) { return p_variation(x, p, 0.0, x.horizon()); }

double control_eval(const GridPath& x, double p, double s, double t) {
    if (s > t) throw std::invalid_argument("control_eval: s > t");
    return std::pow(p_variation(x, p, s, t), p);
}

Partition find_partition(const GridPath& W, const GridPath& c, double q, double eps_bar) {
    if (!(eps_bar > 0.0)) throw std::invalid_argument("find_partition: eps_bar must be positive");
    if (q < 1.0) throw std::invalid_argument("find_partition: q must be >= 1");
    const std::vector<double> grid = merge_grids(W.times(), c.times());
    const double budget = std::pow(eps_bar, q);
    const std::size_t dim = static_cast<std::size_t>(W.dim());

    Partition out;
    out.breakpoints.push_back(grid.front());

    std::size_t a = 0;
    // Incremental DP over the key points of W on (grid[a], grid[b]].
    std::vector<double> flat;
    std::vector<double> V;
    auto append = [&](const Vec& v) {
        std::size_t n = V.size();
        if (n > 0) {
            bool same = true;
            for (std::size_t k = 0; k < dim; ++k)
                if (flat[(n - 1) * dim + k] != v(static_cast<Eigen::Index>(k))) same = false;
            if (same) return;
        }
        for (std::size_t k = 0; k < dim; ++k) flat.push_back(v(static_cast<Eigen::Index>(k)));
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                double d = flat[n * dim + k] - flat[i * dim + k];
                acc += d * d;
            }
            best = std::max(best, V[i] + powp(std::sqrt(acc), q));
        }
        V.push_back(best);
    };
    auto reset = [&](std::size_t start) {
        flat.clear();
        V.clear();
        append(W.eval_right(grid[start]));
    };

    reset(a);
    std::size_t b = a;
    while (b + 1 < grid.size()) {
        // Snapshot so the candidate extension can be rolled back.
        const std::size_t saved_n = V.size();
        if (b > a) append(W.eval_right(grid[b]));
        append(W.eval_left(grid[b + 1]));
        append(W.eval(grid[b + 1]));
        const double wq = V.back();
        const double dc = (c.eval(grid[b + 1]) - c.eval(grid[a])).norm();
        if (wq <= budget * (1 + 1e-12) && dc <= eps_bar * (1 + 1e-12)) {
            ++b;
            continue;
        }
        V.resize(saved_n);
        flat.resize(saved_n * dim);
        if (b == a) {
            // A single cell already exceeds eps_bar: accept it on its own.
            ++out.forced_cells;
            b = a + 1;
        }
        out.breakpoints.push_back(grid[b]);
        a = b;
        reset(a);
    }
    if (out.breakpoints.back() != grid.back()) out.breakpoints.push_back(grid.back());
    return out;
}

double partition_count_bound(const GridPath& W, const GridPath& c, double q, double eps_bar) {
    const double cT = (c.eval(c.horizon()) - c.eval(0.0)).norm();
    return 1.0 + std::max(cT, p_variation(W, q)) / eps_bar;
}

}  // namespace roughbsde
