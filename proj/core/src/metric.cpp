#include "roughbsde/metric.hpp"

#include "roughbsde/pvariation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace roughbsde {

std::vector<PathSample> path_samples(const GridPath& path, int refine) {
    if (refine < 1) throw std::invalid_argument("path_samples: refine must be >= 1");
    std::vector<PathSample> out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        out.push_back({path.time(i), path.at(i)});
        if (path.right(i) != path.at(i)) out.push_back({path.time(i), path.right(i)});
        if (i + 1 < path.size() && refine > 1) {
            const double t0 = path.time(i), t1 = path.time(i + 1);
            const Vec& x0 = path.right(i);
            const Vec x1 = path.is_linear() ? path.left(i + 1) : path.right(i);
            for (int k = 1; k < refine; ++k) {
                const double w = static_cast<double>(k) / refine;
                out.push_back({t0 + w * (t1 - t0), (1.0 - w) * x0 + w * x1});
            }
        }
    }
    return out;
}

PathSample sample_at(const std::vector<PathSample>& s, double pos) {
    if (s.empty()) throw std::invalid_argument("sample_at: empty sequence");
    const double last = static_cast<double>(s.size() - 1);
    pos = std::clamp(pos, 0.0, last);
    const std::size_t i = static_cast<std::size_t>(std::floor(pos));
    const double u = pos - static_cast<double>(i);
    if (u == 0.0 || i + 1 >= s.size()) return s[i];
    return {(1.0 - u) * s[i].t + u * s[i + 1].t, (1.0 - u) * s[i].x + u * s[i + 1].x};
}

void evaluate_matching(const std::vector<PathSample>& a, const std::vector<PathSample>& b, double p,
                       ReparamMatching& m) {
    m.time_distortion = 0.0;
    std::vector<Vec> d;
    d.reserve(m.pairs.size());
    for (const MatchPoint& mp : m.pairs) {
        const PathSample x = sample_at(a, mp.a), y = sample_at(b, mp.b);
        m.time_distortion = std::max(m.time_distortion, std::abs(x.t - y.t));
        d.push_back(x.x - y.x);
    }
    if (std::isinf(p)) {
        double sup = 0.0;
        for (const Vec& v : d) sup = std::max(sup, v.norm());
        m.pvar_diff = sup;
    } else {
        m.pvar_diff = pvar_sequence(d, p);
    }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint32_t kNoState = static_cast<std::uint32_t>(-1);

/// Matching states on the n¹ × n² grid, three per cell: V pairs samples i and
/// j; A pairs sample a_i with its projection onto the piece (b_j, b_{j+1});
/// B pairs the projection of b_j onto (a_i, a_{i+1}) with b_j.
struct Lattice {
    enum Type : std::uint32_t { V = 0, A = 1, B = 2 };

    std::size_t n1, n2, dim;
    std::vector<unsigned char> valid;
    std::vector<double> frac;  ///< interior fraction of A/B states
    std::vector<double> dt;
    std::vector<double> diff;  ///< dim values per state

    Lattice(const std::vector<PathSample>& a, const std::vector<PathSample>& b, bool vertices_only = false)
        : n1(a.size()), n2(b.size()), dim(static_cast<std::size_t>(a.front().x.size())) {
        const std::size_t n = n1 * n2 * 3;
        valid.assign(n, 0);
        frac.assign(n, 0.0);
        dt.assign(n, kInf);
        diff.assign(n * dim, 0.0);
        auto put = [&](std::size_t s, double ta, double tb, const Vec& d) {
            valid[s] = 1;
            dt[s] = std::abs(ta - tb);
            for (std::size_t k = 0; k < dim; ++k) diff[s * dim + k] = d(static_cast<Eigen::Index>(k));
        };
        // Fraction of the projection of x onto the piece from s[k] to s[k+1];
        // negative when it is not strictly interior or the piece has no duration.
        auto project = [](const std::vector<PathSample>& s, std::size_t k, const Vec& x) {
            if (k + 1 >= s.size() || !(s[k + 1].t > s[k].t)) return -1.0;
            const Vec seg = s[k + 1].x - s[k].x;
            const double len2 = seg.squaredNorm();
            if (len2 == 0.0) return -1.0;
            const double u = (x - s[k].x).dot(seg) / len2;
            return u > 1e-9 && u < 1.0 - 1e-9 ? u : -1.0;
        };
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) {
                put(id(i, j, V), a[i].t, b[j].t, a[i].x - b[j].x);
                if (vertices_only) continue;
                if (const double u = project(b, j, a[i].x); u > 0.0) {
                    const PathSample y = sample_at(b, static_cast<double>(j) + u);
                    put(id(i, j, A), a[i].t, y.t, a[i].x - y.x);
                    frac[id(i, j, A)] = u;
                }
                if (const double v = project(a, i, b[j].x); v > 0.0) {
                    const PathSample x = sample_at(a, static_cast<double>(i) + v);
                    put(id(i, j, B), x.t, b[j].t, x.x - b[j].x);
                    frac[id(i, j, B)] = v;
                }
            }
    }
    std::size_t id(std::size_t i, std::size_t j, Type t = V) const { return (i * n2 + j) * 3 + t; }
    std::size_t size() const { return valid.size(); }
    Eigen::Map<const Vec> d(std::size_t s) const {
        return Eigen::Map<const Vec>(diff.data() + s * dim, static_cast<Eigen::Index>(dim));
    }
    double dist(std::size_t s1, std::size_t s2) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double v = diff[s1 * dim + k] - diff[s2 * dim + k];
            acc += v * v;
        }
        return std::sqrt(acc);
    }
    MatchPoint point(std::size_t s) const {
        const std::size_t cell = s / 3, i = cell / n2, j = cell % n2;
        switch (s % 3) {
            case A: return {static_cast<double>(i), static_cast<double>(j) + frac[s]};
            case B: return {static_cast<double>(i) + frac[s], static_cast<double>(j)};
            default: return {static_cast<double>(i), static_cast<double>(j)};
        }
    }

    /// Monotone successors of state s; `diagonal` marks moves advancing both sequences to samples.
    template <class F>
    void successors(std::size_t s, F&& emit) const {
        const std::size_t cell = s / 3, i = cell / n2, j = cell % n2;
        const bool ni = i + 1 < n1, nj = j + 1 < n2;
        switch (s % 3) {
            case V:
                if (ni) emit(id(i + 1, j, V), false);
                if (nj) emit(id(i, j + 1, V), false);
                if (ni && nj) emit(id(i + 1, j + 1, V), true);
                emit(id(i, j, A), false);
                if (ni) emit(id(i + 1, j, A), false);
                emit(id(i, j, B), false);
                if (nj) emit(id(i, j + 1, B), false);
                break;
            case A:  // (i, j + u)
                emit(id(i, j + 1, V), false);
                if (ni) {
                    emit(id(i + 1, j + 1, V), true);
                    if (frac[id(i + 1, j, A)] >= frac[s]) emit(id(i + 1, j, A), false);
                }
                emit(id(i, j + 1, B), false);
                break;
            default:  // (i + v, j)
                emit(id(i + 1, j, V), false);
                if (nj) {
                    emit(id(i + 1, j + 1, V), true);
                    if (frac[id(i, j + 1, B)] >= frac[s]) emit(id(i, j + 1, B), false);
                }
                emit(id(i + 1, j, A), false);
                break;
        }
    }
};

enum class Surrogate { Bottleneck, PowerSum, AbsSum };

/// Optimal state path under a band |σ − ρ| ≤ theta and a surrogate cost.
/// Returns false when the band admits no path.
bool band_dp(const Lattice& L, double theta, Surrogate kind, double p, bool with_time, ReparamMatching& out,
             double& score) {
    const std::size_t n = L.size();
    std::vector<double> cost(n, kInf);
    std::vector<std::uint32_t> from(n, kNoState);
    std::vector<unsigned char> diag(n, 0);
    auto node_cost = [&](std::size_t s) {
        const double v = L.d(s).norm();
        return with_time ? std::max(v, L.dt[s]) : v;
    };
    auto allowed = [&](std::size_t s) { return L.valid[s] && L.dt[s] <= theta; };
    const std::size_t first = 0, last = L.id(L.n1 - 1, L.n2 - 1);
    if (!allowed(first) || !allowed(last)) return false;
    cost[first] = kind == Surrogate::Bottleneck ? node_cost(first) : 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        if (cost[s] == kInf) continue;
        L.successors(s, [&](std::size_t t, bool diagonal) {
            if (!allowed(t)) return;
            double v;
            if (kind == Surrogate::Bottleneck) {
                v = std::max(cost[s], node_cost(t));
            } else {
                const double step = L.dist(s, t);
                v = cost[s] + (kind == Surrogate::PowerSum ? std::pow(step, p) : step);
            }
            // Prefer diagonal moves on ties: they keep λ closest to a bijection.
            if (v < cost[t] || (v == cost[t] && diagonal && !diag[t])) {
                cost[t] = v;
                from[t] = static_cast<std::uint32_t>(s);
                diag[t] = diagonal;
            }
        });
    }
    if (cost[last] == kInf) return false;
    score = cost[last];
    out.pairs.clear();
    for (std::size_t s = last;; s = from[s]) {
        out.pairs.push_back(L.point(s));
        if (s == first) break;
    }
    std::reverse(out.pairs.begin(), out.pairs.end());
    return true;
}

}  // namespace

ReparamMatching best_matching_upper(const std::vector<PathSample>& a, const std::vector<PathSample>& b, double p,
                                    const AlphaOptions& options) {
    if (a.empty() || b.empty()) throw std::invalid_argument("alpha: empty sample sequence");
    if (options.beam < 1) throw std::invalid_argument("alpha: beam must be >= 1");
    const Lattice L(a, b);
    const bool sup = std::isinf(p);

    struct Candidate {
        ReparamMatching m;
        double estimate;
    };
    std::vector<Candidate> families[3];

    ReparamMatching best;
    double score = 0.0;
    band_dp(L, kInf, Surrogate::Bottleneck, p, true, best, score);
    evaluate_matching(a, b, p, best);

    // Thresholds: distinct time distortions at geometrically spaced levels
    // below the current best objective; a second pass zooms in below the
    // improved objective.
    const double floor_theta = std::max(L.dt[0], L.dt[L.id(L.n1 - 1, L.n2 - 1)]);
    std::vector<double> all;
    for (double v : L.dt)
        if (v >= floor_theta && v < kInf) all.push_back(v);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    const std::size_t nb = static_cast<std::size_t>(std::max(1, options.bands));
    std::set<double> tried;
    const bool small = all.size() <= static_cast<std::size_t>(std::max(0, options.exhaustive));

    for (int pass = 0; pass < 2; ++pass) {
        const double hi = best.objective();
        std::vector<double> thetas{floor_theta};
        auto first_pos = std::upper_bound(all.begin(), all.end(), floor_theta);
        if (small) {
            for (auto it = first_pos; it != all.end() && *it <= hi; ++it) thetas.push_back(*it);
        } else if (first_pos != all.end() && *first_pos <= hi) {
            const double lo = *first_pos;
            for (std::size_t k = 0; k < nb; ++k) {
                const double target = nb == 1 ? hi : lo * std::pow(hi / lo, static_cast<double>(k) / (nb - 1));
                auto it = std::upper_bound(all.begin(), all.end(), target * (1.0 + 1e-12));
                if (it != all.begin()) thetas.push_back(*std::prev(it));
            }
        }
        for (auto& fam : families) fam.clear();
        for (double theta : thetas) {
            if (!tried.insert(theta).second) continue;
            ReparamMatching m;
            if (band_dp(L, theta, Surrogate::Bottleneck, p, false, m, score))
                families[0].push_back({m, std::max(theta, score)});
            if (sup) continue;
            if (band_dp(L, theta, Surrogate::PowerSum, p, false, m, score))
                families[1].push_back({m, std::max(theta, std::pow(score, 1.0 / p))});
            if (band_dp(L, theta, Surrogate::AbsSum, p, false, m, score))
                families[2].push_back({m, std::max(theta, score)});
        }
        // Each family's surrogate optimum S(θ) is nonincreasing in θ, so the
        // minimum of max(θ, S(θ)) sits at the crossing; bisect for it and keep
        // the neighbouring bands as well.
        if (pass == 0 && first_pos != all.end()) {
            const std::size_t lo0 = static_cast<std::size_t>(first_pos - all.begin());
            for (int f = 0; f < (sup ? 1 : 3); ++f) {
                const Surrogate kind = f == 0 ? Surrogate::Bottleneck : f == 1 ? Surrogate::PowerSum : Surrogate::AbsSum;
                auto surrogate = [&](std::size_t k, ReparamMatching& m) {
                    if (!band_dp(L, all[k], kind, p, false, m, score)) return kInf;
                    return kind == Surrogate::PowerSum ? std::pow(score, 1.0 / p) : score;
                };
                std::size_t lo = lo0, hi_k = all.size() - 1;
                ReparamMatching m;
                while (lo < hi_k) {
                    const std::size_t mid = lo + (hi_k - lo) / 2;
                    if (all[mid] >= surrogate(mid, m)) hi_k = mid;
                    else lo = mid + 1;
                }
                const std::size_t w = static_cast<std::size_t>(options.beam);
                for (std::size_t k = lo > lo0 + w ? lo - w : lo0; k <= std::min(all.size() - 1, lo + w); ++k) {
                    if (!tried.insert(all[k]).second) continue;
                    const double est = surrogate(k, m);
                    if (est < kInf) families[f].push_back({m, std::max(all[k], est)});
                }
            }
        }
        for (auto& fam : families) {
            std::stable_sort(fam.begin(), fam.end(), [](const Candidate& x, const Candidate& y) {
                return x.estimate < y.estimate;
            });
            const std::size_t k = small ? fam.size() : std::min<std::size_t>(fam.size(), static_cast<std::size_t>(options.beam));
            for (std::size_t i = 0; i < k; ++i) {
                evaluate_matching(a, b, p, fam[i].m);
                if (fam[i].m.objective() < best.objective()) best = fam[i].m;
            }
        }
    }
    return best;
}

namespace {

// Both extensions are sampled on the union of their breakpoint times, so the
// identity reparameterization is always available to the matching.
std::pair<std::vector<PathSample>, std::vector<PathSample>> extended_samples(const DecoratedPath& a,
                                                                             const DecoratedPath& b, double delta,
                                                                             int refine) {
    const GridPath xa = delta_extension(a, delta).path;
    const GridPath xb = delta_extension(b, delta).path;
    const std::vector<double> grid = merge_grids(xa.times(), xb.times());
    return {path_samples(xa.resampled(grid), refine), path_samples(xb.resampled(grid), refine)};
}

}  // namespace

AlphaResult alpha_p_upper(const DecoratedPath& a, const DecoratedPath& b, double p,
                          const std::vector<double>& delta_schedule, const AlphaOptions& options) {
    if (delta_schedule.empty()) throw std::invalid_argument("alpha_p_upper: empty delta schedule");
    if (options.beam < 1) throw std::invalid_argument("alpha_p_upper: beam must be >= 1");
    if (a.dim() != b.dim()) throw std::invalid_argument("alpha_p_upper: dimension mismatch");
    if (!(p >= 1.0)) throw std::invalid_argument("alpha_p_upper: p must be >= 1");
    AlphaResult out;
    for (double delta : delta_schedule) {
        const auto [sa, sb] = extended_samples(a, b, delta, options.refine);
        ReparamMatching m1 = best_matching_upper(sa, sb, p, options);
        ReparamMatching m2 = best_matching_upper(sb, sa, p, options);
        if (m2.objective() < m1.objective()) {
            for (auto& pr : m2.pairs) std::swap(pr.a, pr.b);
            m1 = m2;
        }
        out.per_delta.push_back(m1.objective());
        if (m1.objective() < out.value) {
            out.value = m1.objective();
            out.best = m1;
        }
    }
    return out;
}

namespace {

struct BranchAndBound {
    const Lattice& L;
    double p;
    bool sup;
    double best;
    std::vector<Vec> pts;
    std::vector<double> V;

    double push(const Vec& v) {
        const std::size_t n = V.size();
        double val = 0.0;
        if (sup) {
            val = std::max(n ? V.back() : 0.0, v.norm());
        } else {
            for (std::size_t i = 0; i < n; ++i) val = std::max(val, V[i] + std::pow((v - pts[i]).norm(), p));
        }
        pts.push_back(v);
        V.push_back(val);
        return sup ? val : std::pow(val, 1.0 / p);
    }
    void pop() {
        pts.pop_back();
        V.pop_back();
    }
    void walk(std::size_t i, std::size_t j, double dist) {
        const std::size_t c = L.id(i, j);
        dist = std::max(dist, L.dt[c]);
        if (dist >= best) return;
        const double diff = push(L.d(c));
        if (std::max(dist, diff) < best) {
            if (i + 1 == L.n1 && j + 1 == L.n2) {
                best = std::max(dist, diff);
            } else {
                if (i + 1 < L.n1 && j + 1 < L.n2) walk(i + 1, j + 1, dist);
                if (i + 1 < L.n1) walk(i + 1, j, dist);
                if (j + 1 < L.n2) walk(i, j + 1, dist);
            }
        }
        pop();
    }
};

}  // namespace

double brute_matching(const std::vector<PathSample>& a, const std::vector<PathSample>& b, double p, double upper) {
    if (a.empty() || b.empty()) throw std::invalid_argument("alpha_brute: empty sample sequence");
    const Lattice L(a, b, true);
    // The bound is only used for pruning; nudge it so that a matching equal
    // to it is still found and returned exactly.
    BranchAndBound bb{L, p, std::isinf(p), std::isinf(upper) ? kInf : std::nextafter(upper, kInf) * (1 + 1e-12), {}, {}};
    bb.walk(0, 0, 0.0);
    return bb.best;
}

double alpha_brute(const DecoratedPath& a, const DecoratedPath& b, double p, double delta, int refine,
                   std::size_t max_points) {
    if (!(p >= 1.0)) throw std::invalid_argument("alpha_brute: p must be >= 1");
    const auto [sa, sb] = extended_samples(a, b, delta, refine);
    if (sa.size() > max_points || sb.size() > max_points)
        throw std::invalid_argument("alpha_brute: grid too large for exhaustive search");
    return brute_matching(sa, sb, p);
}

}  // namespace roughbsde
