#include "roughbsde/drivers.hpp"
#include "roughbsde/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace roughbsde {

namespace {

std::vector<std::size_t> brownian_slices(const TreeModel& tree) {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < tree.steps(); ++s)
        if (tree.kinds[s] == StepKind::Brownian) out.push_back(s);
    return out;
}

double weighted_quantile(std::vector<std::pair<double, double>> vw, double q) {
    std::sort(vw.begin(), vw.end());
    double total = 0.0;
    for (auto& x : vw) total += x.second;
    double acc = 0.0;
    for (auto& [v, w] : vw) {
        acc += w;
        if (acc >= q * total - 1e-15) return v;
    }
    return vw.empty() ? 0.0 : vw.back().first;
}

bool nonincreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1] * (1.0 + 1e-9) + 1e-12) return false;
    // A column that starts positive must actually go down.
    return v.empty() || v.front() <= 1e-12 || v.back() < v.front();
}

}  // namespace

StabilityReport stability_experiment(const StabilityConfig& cfg) {
    if (cfg.meshes.empty()) throw std::invalid_argument("stability: empty mesh ladder");
    for (std::size_t i = 1; i < cfg.meshes.size(); ++i)
        if (!(cfg.meshes[i] < cfg.meshes[i - 1])) throw std::invalid_argument("stability: ladder must strictly decrease");
    TreeConfig tc;
    tc.steps = cfg.steps;
    const Problem& limit = cfg.limit;
    const Solution lim = solve_rbsde(limit, tc, cfg.solver);
    const GridPath w_tree = lim.tree.driver_path();
    const DecoratedPath w_inf = limit.mode == JumpMode::Marcus ? embed_jmath(limit.W) : embed_iota(limit.W);

    // Tree paths with their probability weights.
    StabilityReport report;
    std::vector<std::vector<std::uint8_t>> paths;
    std::vector<double> weights;
    const int n = lim.tree.brownian_steps();
    if (n <= 12) {
        report.exact_paths = true;
        for (std::uint32_t code = 0; code < (1u << n); ++code) {
            std::vector<std::uint8_t> ups(static_cast<std::size_t>(n));
            for (int b = 0; b < n; ++b) ups[static_cast<std::size_t>(b)] = (code >> b) & 1u;
            paths.push_back(std::move(ups));
            weights.push_back(std::ldexp(1.0, -n));
        }
    } else {
        std::mt19937_64 rng(cfg.seed);
        std::bernoulli_distribution coin(0.5);
        for (int k = 0; k < cfg.n_path_samples; ++k) {
            std::vector<std::uint8_t> ups(static_cast<std::size_t>(n));
            for (auto& u : ups) u = coin(rng) ? 1 : 0;
            paths.push_back(std::move(ups));
            weights.push_back(1.0 / cfg.n_path_samples);
        }
    }
    report.paths = paths.size();

    std::vector<DecoratedPath> y_inf;
    for (const auto& ups : paths)
        y_inf.push_back(lift_solution(lim.path(ups), limit.g, w_tree, limit.mode, cfg.excursion_samples));
    const std::vector<std::size_t> b_inf = brownian_slices(lim.tree);

    for (double mesh : cfg.meshes) {
        Problem pk = limit;
        pk.W = wong_zakai(limit.W, mesh);
        const Solution sk = solve_rbsde(pk, tc, cfg.solver);
        const std::vector<std::size_t> b_k = brownian_slices(sk.tree);
        if (b_k.size() != b_inf.size()) throw std::runtime_error("stability: trees are not aligned");

        StabilityRow row;
        row.mesh = mesh;
        for (std::size_t b = 0; b < b_k.size(); ++b) {
            const std::size_t sk_s = b_k[b], si = b_inf[b];
            double e = 0.0;
            for (int j = 0; j < sk.tree.nodes(sk_s); ++j)
                e += sk.tree.node_probability(sk_s, j) * (sk.Z.at(sk_s, j) - lim.Z.at(si, j)).squaredNorm();
            row.z_l2 += e * sk.tree.dc;
        }
        std::vector<std::pair<double, double>> alphas;
        for (std::size_t k = 0; k < paths.size(); ++k) {
            const DecoratedPath yk = embed_iota(sk.path(paths[k]));
            const double a = alpha_p_upper(yk, y_inf[k], cfg.p, cfg.delta_schedule, cfg.alpha).value;
            alphas.emplace_back(a, weights[k]);
            row.mean_alpha_y += weights[k] * a;
        }
        double wsum = 0.0;
        for (double w : weights) wsum += w;
        row.mean_alpha_y /= wsum;
        row.q90_alpha_y = weighted_quantile(alphas, 0.9);
        row.alpha_w = alpha_p_upper(embed_iota(pk.W), w_inf, cfg.q, cfg.delta_schedule, cfg.alpha).value;
        report.rows.push_back(row);
    }

    std::vector<double> ay, aw, z;
    for (const auto& r : report.rows) {
        ay.push_back(r.mean_alpha_y);
        aw.push_back(r.alpha_w);
        z.push_back(r.z_l2);
    }
    report.alpha_y_decreasing = nonincreasing(ay);
    report.alpha_w_decreasing = nonincreasing(aw);
    report.z_decreasing = nonincreasing(z);
    report.final_third = ay.back() <= ay.front() / 3.0 + 1e-12;
    return report;
}

}  // namespace roughbsde
