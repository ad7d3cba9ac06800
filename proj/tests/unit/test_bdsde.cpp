#include "roughbsde/bdsde.hpp"
#include "roughbsde/drivers.hpp"
#include "roughbsde/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace roughbsde;

namespace {

BdsdeRun two_point_run(int n, bool antithetic) {
    BdsdeRun run;
    run.problem.g = VectorField::linear({Mat::Identity(1, 1)});
    run.problem.xi = Terminal::constant(scalar_vec(1.0));
    run.sampler.kind = DriverKind::TwoPoint;
    run.sampler.two_point_size = 0.5;
    run.sampler.antithetic = antithetic;
    run.n_outer = n;
    run.tree.steps = 10;
    return run;
}

}  // namespace

TEST(Bdsde, PointMassEqualsSingleSolve) {
    BdsdeRun run = two_point_run(3, false);
    run.sampler = DriverSpec{};
    run.sampler.jump_times = {0.4};
    run.sampler.jump_sizes = {0.3};
    const BdsdeResult r = solve_bdsde(run);
    Problem pr = run.problem;
    pr.W = generate(run.sampler);
    const double direct = solve_rbsde(pr, run.tree).y0()(0);
    EXPECT_EQ(r.aggregate.mean_y0, direct);
    EXPECT_EQ(r.aggregate.std_error, 0.0);
}

TEST(Bdsde, TwoPointMeanIsCosh) {
    const BdsdeResult r = solve_bdsde(two_point_run(8, true));
    EXPECT_NEAR(r.aggregate.mean_y0, std::cosh(0.5), 1e-9);
}

TEST(Bdsde, PrefixDeterminism) {
    const BdsdeResult a = solve_bdsde(two_point_run(10, false));
    const BdsdeResult b = solve_bdsde(two_point_run(20, false));
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        EXPECT_EQ(a.samples[i].seed, b.samples[i].seed);
        EXPECT_EQ(a.samples[i].y0, b.samples[i].y0);
    }
}

TEST(Bdsde, AggregateRecomputable) {
    const BdsdeResult r = solve_bdsde(two_point_run(15, false));
    const BdsdeAggregate again = aggregate_samples(r.samples);
    EXPECT_EQ(again.mean_y0, r.aggregate.mean_y0);
    EXPECT_EQ(again.std_error, r.aggregate.std_error);
    EXPECT_EQ(again.q50, r.aggregate.q50);
    EXPECT_EQ(again.mean_z_energy, r.aggregate.mean_z_energy);
}

TEST(Bdsde, SeedsFollowBasePlusIndex) {
    EXPECT_EQ(sample_seed(100, 7, 0), 107u);
    EXPECT_NE(sample_seed(100, 7, 1), 107u);
}

TEST(Bdsde, RejectionsAbortWhenTooFrequent) {
    BdsdeRun run = two_point_run(10, false);
    run.q_bound = 0.1;  // every two-point path has q-variation 0.5
    EXPECT_THROW(solve_bdsde(run), AssumptionError);
}

TEST(Ito, LinearFunctionExact) {
    const GridPath A = pure_jump(1.0, {{0.3, 0.5}, {0.7, -1.0}});
    const std::vector<std::uint8_t> ups{1, 0, 0, 1, 1, 0, 1, 1};
    EXPECT_LE(ito_residual(ScalarFunction::Linear, A, tree_brownian(ups, 1.0), 1.0), 1e-12);
}

TEST(Ito, SquareOnTreeWithoutDriftIsExact) {
    std::vector<std::uint8_t> ups(2000);
    for (std::size_t i = 0; i < ups.size(); ++i) ups[i] = (i * 7 + i / 3) % 2;
    const double dt = 1.0 / 2000;
    EXPECT_LE(ito_residual(ScalarFunction::Square, GridPath::constant(1.0, scalar_vec(0.0)), tree_brownian(ups, 1.0), 1.0),
              10 * dt);
}

TEST(Ito, PureJumpTelescopes) {
    const GridPath A = pure_jump(1.0, {{0.2, 0.5}, {0.5, -1.5}, {0.9, 0.25}});
    for (ScalarFunction f : {ScalarFunction::Square, ScalarFunction::Sin, ScalarFunction::ExpClipped})
        EXPECT_LE(ito_residual(f, A, {}, 1.0), 1e-12);
}

TEST(QuadraticVariation, NoDriftOnOwnGrid) {
    const QvLadder q = qv_check(GridPath::constant(1.0, scalar_vec(0.0)), 64, {1}, 8);
    EXPECT_LE(q.rms_residual.back(), 1e-12);
}

TEST(QuadraticVariation, UnitJump) {
    const QvLadder q = qv_check(pure_jump(1.0, {{0.5, 1.0}}), 64, {4, 1}, 0);
    EXPECT_DOUBLE_EQ(q.jump_part, 1.0);
    EXPECT_LE(q.rms_residual.back(), 1e-12);
}

TEST(QuadraticVariation, ZigzagLadderMonotone) {
    DriverSpec d;
    d.kind = DriverKind::Zigzag;
    d.zigzag_values = {0.0, 0.5, 0.0, 0.5, 0.0};
    const QvLadder q = qv_check(generate(d), 512, {8, 4, 2, 1}, 16);
    EXPECT_TRUE(q.monotone);
}

TEST(Stability, ZeroDriverGivesZeroColumns) {
    StabilityConfig cfg;
    cfg.limit.xi = Terminal::affine(scalar_vec(0.0), scalar_vec(1.0));
    cfg.meshes = {0.5, 0.25};
    cfg.steps = 8;
    const StabilityReport r = stability_experiment(cfg);
    for (const StabilityRow& row : r.rows) {
        EXPECT_EQ(row.mean_alpha_y, 0.0);
        EXPECT_EQ(row.z_l2, 0.0);
        EXPECT_EQ(row.alpha_w, 0.0);
    }
}

TEST(Stability, RejectsIncreasingLadder) {
    StabilityConfig cfg;
    cfg.meshes = {0.1, 0.2};
    EXPECT_THROW(stability_experiment(cfg), std::invalid_argument);
}
