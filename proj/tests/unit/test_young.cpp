#include "roughbsde/drivers.hpp"
#include "roughbsde/pvariation.hpp"
#include "roughbsde/young.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace roughbsde;

namespace {

GridPath unit_step() { return pure_jump(1.0, {{0.5, 1.0}}); }

GridPath uniform_identity(int n) {
    std::vector<double> g;
    for (int i = 0; i <= n; ++i) g.push_back(static_cast<double>(i) / n);
    return GridPath::identity(1.0).resampled(g);
}

GridPath random_steps(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> t;
    std::vector<Vec> levels;
    for (int i = 0; i <= n; ++i) t.push_back(static_cast<double>(i) / n);
    for (int i = 0; i < n; ++i) levels.push_back(scalar_vec(U(rng)));
    return GridPath::caglad_steps(t, scalar_vec(U(rng)), levels);
}

}  // namespace

TEST(BackwardYoung, OneIntegrandGivesIncrement) {
    std::mt19937_64 rng(1);
    const GridPath y = random_steps(rng, 7);
    const GridPath one = GridPath::constant(1.0, scalar_vec(1.0));
    EXPECT_NEAR(backward_young(one, y).total(0), y.at(y.size() - 1)(0) - y.at(0)(0), 1e-14);
    EXPECT_NEAR(forward_young(one, y).total(0), y.at(y.size() - 1)(0) - y.at(0)(0), 1e-14);
}

TEST(BackwardYoung, RiemannOracleForTdt) {
    EXPECT_NEAR(backward_young(uniform_identity(2000), uniform_identity(2000)).total(0), 0.5, 5e-4);
    EXPECT_NEAR(forward_young(uniform_identity(2000), uniform_identity(2000)).total(0), 0.5, 5e-4);
}

TEST(BackwardYoung, SingleJumpUsesRightLimit) {
    EXPECT_DOUBLE_EQ(backward_young(unit_step(), unit_step()).total(0), 1.0);
    EXPECT_DOUBLE_EQ(forward_young(unit_step(), unit_step()).total(0), 0.0);
}

TEST(BackwardYoung, RightAnchoredCumulative) {
    const GridPath y = uniform_identity(10);
    const GridPath x = GridPath::constant(1.0, scalar_vec(2.0));
    const YoungIntegralResult r = backward_young(x, y, Anchor::Right);
    EXPECT_NEAR(r.cumulative.eval(0.3)(0), 2.0 * 0.7, 1e-14);
    EXPECT_NEAR(r.cumulative.eval(1.0)(0), 0.0, 1e-14);
}

TEST(BackwardYoung, ChaslesOnGridPoints) {
    std::mt19937_64 rng(2);
    const GridPath x = random_steps(rng, 8), y = random_steps(rng, 6);
    const YoungIntegralResult r = backward_young(x, y);
    const GridPath& c = r.cumulative;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double whole = c.at(c.size() - 1)(0) - c.at(0)(0);
        const double parts = (c.at(i)(0) - c.at(0)(0)) + (c.at(c.size() - 1)(0) - c.at(i)(0));
        EXPECT_NEAR(parts, whole, 1e-14);
    }
}

TEST(BackwardYoung, Bilinear) {
    std::mt19937_64 rng(3);
    const GridPath x1 = random_steps(rng, 5), x2 = random_steps(rng, 7), y = random_steps(rng, 4);
    const double lhs = backward_young(combine(x1, 2.0, x2, -3.0), y).total(0);
    const double rhs = 2.0 * backward_young(x1, y).total(0) - 3.0 * backward_young(x2, y).total(0);
    EXPECT_NEAR(lhs, rhs, 1e-13);
}

TEST(YoungLoeve, ConstantRequiresComplementaryRegularity) {
    EXPECT_THROW(young_loeve_constant(2.0, 2.0), std::invalid_argument);
    EXPECT_NEAR(young_loeve_constant(1.0, 1.0), 2.0, 1e-15);
}

TEST(JumpCorrection, ContinuousIntegratorGivesZero) {
    EXPECT_EQ(jump_correction(unit_step(), uniform_identity(4), JumpSide::Plus)(0), 0.0);
}

TEST(JumpCorrection, SharedUnitJump) { EXPECT_EQ(jump_correction(unit_step(), unit_step(), JumpSide::Plus)(0), 1.0); }

TEST(JumpCorrection, TwoJumpsSumProducts) {
    const GridPath x = pure_jump(1.0, {{0.25, 2.0}, {0.75, -1.5}});
    const GridPath y = pure_jump(1.0, {{0.25, 0.5}, {0.75, 3.0}});
    EXPECT_DOUBLE_EQ(jump_correction(x, y, JumpSide::Plus)(0), 2.0 * 0.5 - 1.5 * 3.0);
}

TEST(JumpCorrection, BackwardMinusForwardOnRandomPureJump) {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 30; ++k) {
        const GridPath x = random_steps(rng, 3 + k % 6), y = random_steps(rng, 2 + k % 5);
        const double d = backward_young(x, y).total(0) - forward_young(x, y).total(0);
        EXPECT_NEAR(d, jump_correction(x, y, JumpSide::Plus)(0), 1e-12);
    }
}

TEST(DyPlus, ContinuousIntegratorHasNoDefect) {
    std::vector<double> t{0.0, 0.5, 1.0};
    const GridPath x(t, {scalar_vec(1.0), scalar_vec(1.0), scalar_vec(2.0)},
                     {scalar_vec(1.0), scalar_vec(2.0), scalar_vec(2.0)}, PathMode::CadlagPureJump);
    EXPECT_NEAR(dy_plus_shift(x, uniform_identity(4)).defect()(0), 0.0, 1e-14);
}

TEST(DyPlus, InteriorUnitJumpWithUnitIntegrand) {
    const GridPath one(std::vector<double>{0.0, 0.5, 1.0}, {scalar_vec(1.0), scalar_vec(1.0), scalar_vec(1.0)},
                       {scalar_vec(1.0), scalar_vec(1.0), scalar_vec(1.0)}, PathMode::CadlagPureJump);
    const DyPlusShift s = dy_plus_shift(one, unit_step());
    EXPECT_NEAR(s.defect()(0), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(s.plain(0), 1.0);
}

TEST(DyPlus, JumpAtZeroShiftsByBoundary) {
    const GridPath y = GridPath::caglad_steps({0.0, 1.0}, scalar_vec(0.0), {scalar_vec(0.7)});
    const GridPath two(std::vector<double>{0.0, 1.0}, {scalar_vec(2.0), scalar_vec(2.0)},
                       {scalar_vec(2.0), scalar_vec(2.0)}, PathMode::CadlagPureJump);
    const DyPlusShift s = dy_plus_shift(two, y);
    EXPECT_NEAR(s.with_plus(0) - s.plain(0), -2.0 * 0.7, 1e-14);
    EXPECT_NEAR(s.defect()(0), 0.0, 1e-14);
}

TEST(DyPlus, RejectsWrongContinuity) { EXPECT_THROW(dy_plus_shift(unit_step(), unit_step()), std::invalid_argument); }

TEST(Associativity, UnitIntegrandIsExact) {
    std::mt19937_64 rng(5);
    const GridPath y = random_steps(rng, 6), z = random_steps(rng, 5);
    EXPECT_LE(associativity_check(GridPath::constant(1.0, scalar_vec(1.0)), y, z), 1e-14);
}

TEST(Associativity, PureJumpDisjointTimes) {
    const GridPath x = pure_jump(1.0, {{0.1, 1.0}, {0.6, -0.5}});
    const GridPath y = pure_jump(1.0, {{0.3, 0.4}});
    const GridPath z = pure_jump(1.0, {{0.2, 2.0}, {0.8, 1.0}});
    EXPECT_LE(associativity_check(x, y, z), 1e-12);
}

TEST(Associativity, SmoothIdentity) {
    const GridPath t = uniform_identity(2000);
    EXPECT_LE(associativity_check(t, t, t), 1e-3);
}

TEST(StabilityBound, IdenticalInputsHaveZeroLhs) {
    std::mt19937_64 rng(6);
    const GridPath x = random_steps(rng, 5), y = random_steps(rng, 4);
    EXPECT_EQ(stability_bound_check(x, x, y, y, 2.0, 1.0).lhs, 0.0);
}

TEST(StabilityBound, HoldsOnRandomPureJumpQuadruples) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 100; ++k) {
        const GridPath x1 = random_steps(rng, 4), x2 = random_steps(rng, 5);
        const GridPath y1 = random_steps(rng, 3), y2 = random_steps(rng, 6);
        const StabilityBound b = stability_bound_check(x1, x2, y1, y2, 2.5, 1.2);
        EXPECT_LE(b.lhs, b.rhs * (1 + 1e-12));
    }
}

TEST(StabilityBound, ScaledIntegrator) {
    std::mt19937_64 rng(8);
    const GridPath x = random_steps(rng, 5), y = random_steps(rng, 5);
    const StabilityBound b = stability_bound_check(x, x, y, y.scaled(1.01), 3.0, 1.0);
    EXPECT_GT(b.lhs, 0.0);
    EXPECT_LE(b.lhs, b.rhs);
}
