#include "roughbsde/selftest.hpp"

#include "roughbsde/bdsde.hpp"
#include "roughbsde/csv_io.hpp"
#include "roughbsde/decorated.hpp"
#include "roughbsde/drivers.hpp"
#include "roughbsde/experiments.hpp"
#include "roughbsde/marcus.hpp"
#include "roughbsde/metric.hpp"
#include "roughbsde/pvariation.hpp"
#include "roughbsde/rbsde.hpp"
#include "roughbsde/young.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace roughbsde {

ConstantTable ConstantTable::defaults() {
    ConstantTable c;
    c.exp_minus_one = std::exp(-1.0);
    c.ln2 = std::log(2.0);
    c.marcus_pre_jump = 2.0;
    c.forward_pre_jump = 1.0 + std::log(2.0);
    c.t_dt = 0.5;
    c.cosh_half = std::cosh(0.5);
    c.iota_vs_jmath = 0.5;
    return c;
}

bool SelftestReport::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

std::vector<std::string> SelftestReport::failed() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (!c.passed) out.push_back(c.name);
    return out;
}

namespace {

struct Measured {
    double value;
    std::string detail = {};
};

double brute_pvar(const std::vector<Vec>& x, double p) {
    const std::size_t n = x.size();
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        double sum = 0.0;
        int prev = -1;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask >> i & 1u)) continue;
            if (prev >= 0) sum += std::pow((x[i] - x[static_cast<std::size_t>(prev)]).norm(), p);
            prev = static_cast<int>(i);
        }
        best = std::max(best, sum);
    }
    return std::pow(best, 1.0 / p);
}

GridPath random_jump_path(std::mt19937_64& rng, int n, double T = 1.0) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> times;
    std::vector<Vec> levels;
    for (int i = 0; i <= n; ++i) times.push_back(T * i / n);
    for (int i = 0; i < n; ++i) levels.push_back(scalar_vec(U(rng)));
    return GridPath::caglad_steps(times, scalar_vec(U(rng)), levels);
}

GridPath random_cadlag(std::mt19937_64& rng, const std::vector<double>& times) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<Vec> left, right;
    Vec level = scalar_vec(U(rng));
    for (std::size_t i = 0; i < times.size(); ++i) {
        left.push_back(level);
        level = scalar_vec(U(rng));
        right.push_back(level);
    }
    left[0] = right[0];
    return GridPath(times, left, right, PathMode::CadlagPureJump);
}

Problem constant_g_problem(JumpMode mode) {
    Problem pr;
    pr.g = VectorField::constant(Mat::Constant(1, 1, 2.0));
    pr.W = pure_jump(1.0, {{0.5, 1.0}});
    pr.mode = mode;
    return pr;
}

Problem linear_g_problem(JumpMode mode, double ln2) {
    Problem pr;
    pr.g = VectorField::linear({Mat::Identity(1, 1)});
    pr.xi = Terminal::constant(scalar_vec(1.0));
    pr.W = pure_jump(1.0, {{0.5, ln2}});
    pr.mode = mode;
    return pr;
}

Problem generic_problem() {
    Problem pr;
    pr.g = VectorField::smooth_bounded(Mat::Constant(1, 1, 0.3), Mat::Constant(1, 1, 0.2));
    pr.f = Generator::affine(scalar_vec(0.1), -0.5, 0.2);
    pr.xi = Terminal::sine(scalar_vec(0.5), scalar_vec(1.0));
    DriverSpec d;
    d.kind = DriverKind::Zigzag;
    d.zigzag_values = {0.0, 0.4, -0.2, 0.3, 0.1};
    GridPath zig = generate(d);
    pr.W = combine(zig, 1.0, pure_jump(1.0, {{0.3, 0.5}, {0.7, -0.4}}), 1.0);
    return pr;
}

}  // namespace

SelftestReport selftest(const SelftestOptions& options) {
    const ConstantTable& K = options.constants;
    SelftestReport report;
    auto run = [&](const std::string& name, double threshold, const std::function<Measured()>& body,
                   bool below = true) {
        CheckResult r;
        r.name = name;
        r.threshold = threshold;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const Measured m = body();
            r.value = m.value;
            r.detail = m.detail;
            r.passed = below ? m.value <= threshold : m.value > threshold;
        } catch (const std::exception& e) {
            r.value = std::nan("");
            r.detail = std::string("exception: ") + e.what();
            r.passed = false;
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report.checks.push_back(std::move(r));
    };

    // pathcore
    run("pathcore.pvar_exhaustive", 1e-12, [] {
        std::mt19937_64 rng(101);
        std::normal_distribution<double> N;
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            std::vector<Vec> x;
            const int n = 2 + k % 9;
            for (int i = 0; i < n; ++i) x.push_back(scalar_vec(N(rng)));
            for (double p : {1.0, 1.5, 2.0, 3.0}) worst = std::max(worst, std::abs(pvar_sequence(x, p) - brute_pvar(x, p)));
        }
        return Measured{worst};
    });
    run("pathcore.partition_smallness", 1e-12, [] {
        DriverSpec d;
        d.kind = DriverKind::Zigzag;
        d.zigzag_values = {0.0, 0.25, 0.05, 0.28, 0.0, 0.2, -0.05};
        const GridPath W = generate(d);
        const GridPath c = GridPath::identity(1.0);
        const Partition part = find_partition(W, c, 1.0, 0.3);
        double excess = 0.0;
        for (std::size_t k = 0; k + 1 < part.breakpoints.size(); ++k) {
            const double a = part.breakpoints[k], b = part.breakpoints[k + 1];
            excess = std::max(excess, p_variation(W, 1.0, a, b, Endpoint::OpenLeft) - 0.3);
            excess = std::max(excess, (b - a) - 0.3);
        }
        return Measured{part.forced_cells ? 1.0 : std::max(0.0, excess)};
    });

    // young
    run("young.t_dt", 5e-4, [&] {
        const GridPath id = GridPath::identity(1.0).resampled([] {
            std::vector<double> g;
            for (int i = 0; i <= 2000; ++i) g.push_back(i / 2000.0);
            return g;
        }());
        return Measured{std::abs(backward_young(id, id).total(0) - K.t_dt)};
    });
    run("young.jump_correction", 1e-12, [] {
        std::mt19937_64 rng(7);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const GridPath x = random_jump_path(rng, 8), y = random_jump_path(rng, 8);
            const Vec d = backward_young(x, y).total - forward_young(x, y).total - jump_correction(x, y, JumpSide::Plus);
            worst = std::max(worst, d.norm());
        }
        return Measured{worst};
    });
    run("young.associativity_pure_jump", 1e-12, [] {
        std::mt19937_64 rng(8);
        double worst = 0.0;
        for (int k = 0; k < 10; ++k)
            worst = std::max(worst, associativity_check(random_jump_path(rng, 6), random_jump_path(rng, 6),
                                                        random_jump_path(rng, 6)));
        return Measured{worst};
    });
    run("young.dA_plus", 1e-12, [] {
        std::mt19937_64 rng(9);
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            const GridPath y = random_jump_path(rng, 7);
            const GridPath x = random_cadlag(rng, y.times());
            const DyPlusShift s = dy_plus_shift(x, y);
            Vec cross = Vec::Zero(1);
            for (std::size_t i = 1; i < y.size(); ++i) cross += x.jump_minus(i).cwiseProduct(y.jump_plus(i));
            worst = std::max(worst, (s.defect() + cross).norm());
        }
        return Measured{worst};
    });

    // marcus
    run("marcus.linear_flow", 1e-9, [] {
        const VectorField g = VectorField::linear({Mat::Constant(1, 1, 0.7)});
        const Vec y = flow(g, 0.0, scalar_vec(0.9), scalar_vec(1.3), 1.0, 64, FlowMethod::RungeKutta);
        return Measured{std::abs(y(0) - 1.3 * std::exp(0.63))};
    });
    run("marcus.semigroup", 1e-9, [] {
        const VectorField g = VectorField::smooth_bounded(Mat::Constant(1, 1, 0.8), Mat::Constant(1, 1, 0.1));
        const Vec x = scalar_vec(0.4), dw = scalar_vec(1.1);
        const Vec whole = flow(g, 0.0, dw, x, 1.0, 256);
        const Vec half = flow(g, 0.0, dw, flow(g, 0.0, dw, x, 0.5, 128), 0.5, 128);
        return Measured{(whole - half).norm()};
    });
    run("marcus.correction_bound", 0.0, [] {
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        const VectorField g = VectorField::smooth_bounded(Mat::Constant(1, 1, 0.6), Mat::Constant(1, 1, 0.3));
        const double cg = g.bound();
        double violations = 0.0;
        for (int k = 0; k < 200; ++k) {
            const Vec y = scalar_vec(3.0 * U(rng)), dw = scalar_vec(2.0 * U(rng));
            if (marcus_correction(g, 0.0, y, dw).norm() > 0.5 * cg * cg * dw.squaredNorm() * (1 + 1e-12)) violations += 1;
        }
        return Measured{violations};
    });

    // decorated
    run("decorated.retract_roundtrip", 1e-12, [] {
        std::mt19937_64 rng(13);
        double worst = 0.0;
        for (int k = 0; k < 5; ++k) {
            const GridPath h = random_jump_path(rng, 6);
            for (const DecoratedPath& d : {embed_iota(h), embed_jmath(h, 5)}) {
                const auto back = retract(delta_extension(d, 0.05), h.times());
                for (std::size_t i = 0; i < h.size(); ++i) worst = std::max(worst, (back[i] - h.at(i)).norm());
            }
        }
        return Measured{worst};
    });

    // metric
    run("metric.j1_shifted_step", 1e-10, [] {
        const GridPath a = pure_jump(1.0, {{0.5, 1.0}}), b = pure_jump(1.0, {{0.6, 1.0}});
        const double alpha = alpha_p_upper(embed_iota(a), embed_iota(b), INFINITY, {1e-4}).value;
        return Measured{std::abs(alpha - 0.1)};
    });
    run("metric.iota_vs_jmath", 1e-6, [&] {
        const GridPath a = pure_jump(1.0, {{0.5, 1.0}});
        const double alpha = alpha_p_upper(embed_iota(a), embed_jmath(a), INFINITY, {1e-7}).value;
        return Measured{std::abs(alpha - K.iota_vs_jmath)};
    });

    // drivers
    run("drivers.seed_determinism", 0.0, [] {
        DriverSpec d;
        d.kind = DriverKind::CompoundPoisson;
        d.rate = 5.0;
        d.seed = 42;
        const Table a = path_table(generate(d)), b = path_table(generate(d));
        d.seed = 43;
        const Table c = path_table(generate(d));
        return Measured{a.rows == b.rows && a.rows != c.rows ? 0.0 : 1.0};
    });
    run("drivers.fbm_cholesky", 1e-6, [] {
        FbmSampler s(0.75, 128, 1.0);
        std::mt19937_64 rng(3);
        const GridPath path = s.sample(rng);
        return Measured{std::isfinite(p_variation(path, 1.5)) ? s.jitter() : 1.0};
    });

    // rbsde
    run("rbsde.constant_g", 1e-12, [] {
        double worst = 0.0;
        for (JumpMode mode : {JumpMode::Forward, JumpMode::Marcus}) {
            const Problem pr = constant_g_problem(mode);
            const Solution s = solve_rbsde(pr, {40});
            for (std::size_t t = 0; t < s.tree.slices(); ++t) {
                const bool before = s.tree.times[t] < 0.5 || (s.tree.times[t] == 0.5 && t + 1 < s.tree.slices() &&
                                                                s.tree.times[t + 1] == 0.5);
                for (int j = 0; j < s.tree.nodes(t); ++j)
                    worst = std::max(worst, std::abs(s.Y.at(t, j)(0) - (before ? 2.0 : 0.0)));
            }
        }
        return Measured{worst};
    });
    run("rbsde.marcus_linear", 1e-10, [&] {
        return Measured{std::abs(solve_rbsde(linear_g_problem(JumpMode::Marcus, K.ln2), {40}).y0()(0) - K.marcus_pre_jump)};
    });
    run("rbsde.forward_linear", 1e-12, [&] {
        return Measured{
            std::abs(solve_rbsde(linear_g_problem(JumpMode::Forward, K.ln2), {40}).y0()(0) - K.forward_pre_jump)};
    });
    run("rbsde.drift_only", 1e-3, [&] {
        Problem pr;
        pr.f = Generator::linear(-1.0);
        pr.xi = Terminal::constant(scalar_vec(1.0));
        return Measured{std::abs(solve_rbsde(pr, {200}).y0()(0) - K.exp_minus_one)};
    });
    run("rbsde.z_equals_one", 1e-12, [] {
        Problem pr;
        pr.xi = Terminal::affine(scalar_vec(0.0), scalar_vec(1.0));
        const Solution s = solve_rbsde(pr, {30});
        double worst = 0.0;
        for (std::size_t t = 0; t < s.tree.steps(); ++t)
            if (s.tree.kinds[t] == StepKind::Brownian)
                for (int j = 0; j < s.tree.nodes(t); ++j) worst = std::max(worst, std::abs(s.Z.at(t, j)(0) - 1.0));
        return Measured{worst};
    });
    run("rbsde.residual_generic", 1e-6, [] {
        const Problem pr = generic_problem();
        return Measured{residual_check(pr, solve_rbsde(pr, {60}))};
    });
    run("rbsde.corrupted_z_detector", 1e-3,
        [] {
            const Problem pr = generic_problem();
            Solution s = solve_rbsde(pr, {60});
            for (auto& row : s.Z.data)
                for (double& v : row) v += 0.1;
            return Measured{residual_check(pr, s)};
        },
        false);
    run("rbsde.apriori_bound", 0.0, [&] {
        double worst = -INFINITY;
        for (const Problem& pr : {constant_g_problem(JumpMode::Marcus), linear_g_problem(JumpMode::Marcus, K.ln2),
                                  linear_g_problem(JumpMode::Forward, K.ln2), generic_problem()}) {
            const Solution s = solve_rbsde(pr, {40});
            worst = std::max(worst, s.diag.max_abs_y - s.diag.apriori);
        }
        return Measured{worst};
    });
    run("rbsde.picard_envelope", 1.0, [] {
        const EnvelopeTable env = picard_envelope_check(generic_problem(), {40}, 25);
        std::ostringstream d;
        d << "iterations=" << env.residuals.size() << " monotone=" << env.eventually_monotone;
        const bool ok = env.eventually_monotone && env.residuals.size() <= 26;
        return Measured{ok ? env.tail_ratio : INFINITY, d.str()};
    });
    run("rbsde.time_stretch", 1e-8, [&] {
        double worst = 0.0;
        for (JumpMode mode : {JumpMode::Forward, JumpMode::Marcus})
            worst = std::max(worst, time_stretched_solve(linear_g_problem(mode, K.ln2), 0.1, {40}).max_difference);
        return Measured{worst};
    });

    // bdsde
    run("bdsde.two_point_cosh", 1e-9, [&] {
        BdsdeRun run;
        run.problem = linear_g_problem(JumpMode::Marcus, K.ln2);
        run.sampler.kind = DriverKind::TwoPoint;
        run.sampler.two_point_size = 0.5;
        run.sampler.antithetic = true;
        run.n_outer = 4;
        run.tree.steps = 20;
        return Measured{std::abs(solve_bdsde(run).aggregate.mean_y0 - K.cosh_half)};
    });

    // appendix
    run("appendix.ito_linear", 1e-12, [] {
        std::mt19937_64 rng(21);
        std::bernoulli_distribution coin;
        std::vector<std::uint8_t> ups(64);
        for (auto& u : ups) u = coin(rng);
        return Measured{ito_residual(ScalarFunction::Linear, random_jump_path(rng, 10), tree_brownian(ups, 1.0), 1.0)};
    });
    run("appendix.ito_pure_jump", 1e-12, [] {
        std::mt19937_64 rng(22);
        return Measured{ito_residual(ScalarFunction::Square, random_jump_path(rng, 10), {}, 1.0)};
    });
    run("appendix.qv_ladder", 0.0, [] {
        DriverSpec d;
        d.kind = DriverKind::Zigzag;
        d.zigzag_values = {0.0, 0.5, 0.0, 0.5, 0.0};
        const QvLadder q = qv_check(combine(generate(d), 1.0, pure_jump(1.0, {{0.5, 1.0}}), 1.0), 512, {8, 4, 2, 1}, 16);
        return Measured{q.monotone ? 0.0 : 1.0};
    });

    // cli
    run("cli.csv_roundtrip", 0.0, [] {
        std::mt19937_64 rng(30);
        const GridPath p = random_jump_path(rng, 5);
        std::stringstream ss;
        write_table(ss, path_table(p));
        const GridPath q = path_from_table(read_table(ss));
        double worst = q.size() == p.size() ? 0.0 : 1.0;
        for (std::size_t i = 0; i < std::min(p.size(), q.size()); ++i)
            worst = std::max({worst, std::abs(p.time(i) - q.time(i)), (p.at(i) - q.at(i)).norm(),
                              (p.right(i) - q.right(i)).norm()});
        return Measured{worst};
    });

    if (options.include_stability) {
        run("cli.stability_ladder", 0.0, [&] {
            StabilityConfig cfg;
            cfg.limit.g = VectorField::linear({Mat::Identity(1, 1)});
            cfg.limit.xi = Terminal::affine(scalar_vec(1.0), scalar_vec(0.5));
            cfg.limit.W = pure_jump(1.0, {{0.4, K.ln2}});
            const StabilityReport r = stability_experiment(cfg);
            std::ostringstream d;
            d << "alpha_y=" << r.alpha_y_decreasing << " alpha_w=" << r.alpha_w_decreasing << " z=" << r.z_decreasing
              << " third=" << r.final_third;
            return Measured{r.passed() ? 0.0 : 1.0, d.str()};
        });
    }
    return report;
}

}  // namespace roughbsde
