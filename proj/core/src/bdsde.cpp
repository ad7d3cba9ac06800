#include "roughbsde/bdsde.hpp"

#include "roughbsde/pvariation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace roughbsde {

std::uint64_t sample_seed(std::uint64_t base_seed, std::size_t index, int attempt) {
    const std::uint64_t seed = base_seed + index;
    if (attempt == 0) return seed;
    // splitmix64 finalizer keeps retries away from other samples' seeds
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double z_energy(const Solution& sol) {
    const TreeModel& tree = sol.tree;
    double total = 0.0;
    for (std::size_t s = 0; s < tree.steps(); ++s) {
        if (tree.kinds[s] != StepKind::Brownian) continue;
        double e = 0.0;
        for (int j = 0; j < tree.nodes(s); ++j) e += tree.node_probability(s, j) * sol.Z.at(s, j).squaredNorm();
        total += e * tree.dc;
    }
    return total;
}

namespace {

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    if (v.empty()) return 0.0;
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double w = pos - static_cast<double>(i);
    return i + 1 < v.size() ? (1.0 - w) * v[i] + w * v[i + 1] : v[i];
}

}  // namespace

BdsdeAggregate aggregate_samples(const std::vector<BdsdeSample>& samples) {
    BdsdeAggregate a;
    a.n = samples.size();
    if (a.n == 0) return a;
    std::vector<double> y;
    for (const auto& s : samples) {
        a.mean_y0 += s.y0;
        a.mean_z_energy += s.z_energy;
        y.push_back(s.y0);
    }
    const double n = static_cast<double>(a.n);
    a.mean_y0 /= n;
    a.mean_z_energy /= n;
    double var = 0.0;
    for (double v : y) var += (v - a.mean_y0) * (v - a.mean_y0);
    a.std_error = a.n > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
    a.q05 = quantile(y, 0.05);
    a.q50 = quantile(y, 0.5);
    a.q95 = quantile(y, 0.95);
    return a;
}

BdsdeResult solve_bdsde(const BdsdeRun& run) {
    if (run.n_outer < 1) throw std::invalid_argument("bdsde: n_outer must be >= 1");
    run.sampler.validate();
    BdsdeResult out;
    const std::size_t allowed = static_cast<std::size_t>(std::floor(0.2 * run.n_outer));
    for (std::size_t i = 0; i < static_cast<std::size_t>(run.n_outer); ++i) {
        BdsdeSample row;
        row.index = i;
        for (int attempt = 0;; ++attempt) {
            DriverSpec spec = run.sampler;
            spec.seed = sample_seed(run.base_seed, i, attempt);
            DriverReport rep;
            GridPath L = generate(spec, &rep);
            const double wq = p_variation(L, run.problem.q);
            if (run.q_bound > 0.0 && wq > run.q_bound) {
                ++out.rejections;
                if (out.rejections > allowed) {
                    std::ostringstream msg;
                    msg << "bdsde: " << out.rejections << " rejected draws exceed 20% of " << run.n_outer
                        << " samples (q-variation " << wq << " > bound " << run.q_bound << " at sample " << i << ")";
                    throw AssumptionError(msg.str());
                }
                continue;
            }
            Problem pr = run.problem;
            pr.W = std::move(L);
            const Solution sol = solve_rbsde(pr, run.tree, run.options);
            row.seed = spec.seed;
            row.attempts = attempt + 1;
            row.y0 = sol.y0()(0);
            row.z_energy = z_energy(sol);
            row.w_qvar = wq;
            row.jumps = rep.jumps;
            break;
        }
        out.samples.push_back(row);
    }
    out.aggregate = aggregate_samples(out.samples);
    return out;
}

}  // namespace roughbsde
