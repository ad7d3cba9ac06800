#include "roughbsde/drivers.hpp"
#include "roughbsde/grid_path.hpp"
#include "roughbsde/pvariation.hpp"
#include "roughbsde/rbsde.hpp"
#include "roughbsde/tree.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace roughbsde;

namespace {

GridPath linear(std::vector<double> v) {
    std::vector<double> t;
    for (std::size_t i = 0; i < v.size(); ++i) t.push_back(static_cast<double>(i));
    return GridPath::continuous_scalar(t, v);
}

double exhaustive(const std::vector<Vec>& x, double p) {
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << x.size()); ++mask) {
        double s = 0.0;
        int prev = -1;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!(mask >> i & 1u)) continue;
            if (prev >= 0) s += std::pow((x[i] - x[static_cast<std::size_t>(prev)]).norm(), p);
            prev = static_cast<int>(i);
        }
        best = std::max(best, s);
    }
    return std::pow(best, 1.0 / p);
}

}  // namespace

TEST(GridPath, OneSidedLimitsOfCagladSteps) {
    const GridPath x = pure_jump(1.0, {{0.5, 2.0}});
    const std::size_t i = x.find_time(0.5);
    ASSERT_NE(i, GridPath::npos);
    EXPECT_EQ(x.at(i)(0), 0.0);
    EXPECT_EQ(x.right(i)(0), 2.0);
    EXPECT_EQ(x.eval(0.5)(0), 0.0);
    EXPECT_EQ(x.eval(0.75)(0), 2.0);
    EXPECT_EQ(x.jump_times(), std::vector<double>{0.5});
}

TEST(GridPath, ResampleKeepsValues) {
    const GridPath x = linear({0.0, 1.0, -1.0});
    const GridPath y = x.resampled({0.0, 0.5, 1.0, 1.25, 2.0});
    EXPECT_DOUBLE_EQ(y.eval(0.5)(0), 0.5);
    EXPECT_DOUBLE_EQ(y.eval(1.25)(0), 0.5);
    EXPECT_DOUBLE_EQ(p_variation(x, 1.0), p_variation(y, 1.0));
}

TEST(GridPath, RejectsUnsortedTimes) {
    EXPECT_THROW(GridPath::continuous_scalar({0.0, 1.0, 0.5}, {0.0, 1.0, 2.0}), std::invalid_argument);
}

TEST(PVariation, MonotonePathIsTotalIncrement) {
    EXPECT_DOUBLE_EQ(p_variation(linear({0.0, 0.5, 2.0}), 1.0), 2.0);
}

TEST(PVariation, ZigzagTwoVariation) {
    EXPECT_NEAR(p_variation(linear({0.0, 1.0, 0.0, 1.0}), 2.0), std::sqrt(3.0), 1e-14);
}

TEST(PVariation, ConstantPathIsZero) {
    for (double p : {1.0, 2.0, HUGE_VAL}) EXPECT_EQ(p_variation(linear({3.0, 3.0, 3.0}), p), 0.0);
}

TEST(PVariation, SingleJump) {
    for (double p : {1.0, 1.5, 4.0}) EXPECT_NEAR(p_variation(pure_jump(1.0, {{0.3, -2.5}}), p), 2.5, 1e-14);
}

TEST(PVariation, DynamicProgrammeMatchesExhaustiveSearch) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N;
    for (int k = 0; k < 40; ++k) {
        std::vector<Vec> x;
        for (int i = 0; i < 2 + k % 11; ++i) x.push_back(scalar_vec(N(rng)));
        for (double p : {1.0, 1.5, 2.0, 3.0}) EXPECT_NEAR(pvar_sequence(x, p), exhaustive(x, p), 1e-12);
    }
}

TEST(PVariation, NonincreasingInExponent) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> N;
    for (int k = 0; k < 20; ++k) {
        std::vector<double> v;
        for (int i = 0; i < 30; ++i) v.push_back(N(rng));
        const GridPath x = linear(v);
        double prev = HUGE_VAL;
        for (double p : {1.0, 1.2, 1.5, 2.0, 3.0, 8.0, HUGE_VAL}) {
            const double now = p_variation(x, p);
            EXPECT_LE(now, prev * (1 + 1e-12));
            prev = now;
        }
    }
}

TEST(PVariation, OpenLeftWindowDropsJumpAtStart) {
    const GridPath x = pure_jump(1.0, {{0.5, 1.0}});
    EXPECT_DOUBLE_EQ(p_variation(x, 1.0, 0.5, 1.0, Endpoint::Closed), 1.0);
    EXPECT_DOUBLE_EQ(p_variation(x, 1.0, 0.5, 1.0, Endpoint::OpenLeft), 0.0);
}

TEST(Control, VanishesOnDiagonal) {
    const GridPath x = linear({0.0, 1.0, 0.0, 1.0});
    EXPECT_EQ(control_eval(x, 2.0, 1.5, 1.5), 0.0);
}

TEST(Control, AdditiveForMonotonePathAtOne) {
    const GridPath x = linear({0.0, 1.0, 3.0});
    EXPECT_NEAR(control_eval(x, 1.0, 0.0, 1.0) + control_eval(x, 1.0, 1.0, 2.0), control_eval(x, 1.0, 0.0, 2.0),
                1e-14);
}

TEST(Control, ZigzagSplit) {
    const GridPath x = linear({0.0, 1.0, 0.0, 1.0});
    EXPECT_NEAR(control_eval(x, 2.0, 0.0, 3.0), 3.0, 1e-12);
    EXPECT_GE(control_eval(x, 2.0, 0.0, 3.0), control_eval(x, 2.0, 0.0, 1.5) + control_eval(x, 2.0, 1.5, 3.0));
}

TEST(Control, SuperadditiveOnRandomTriples) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> U(0.0, 19.0);
    for (double p : {1.0, 2.0, 3.0}) {
        std::vector<double> v;
        for (int i = 0; i < 20; ++i) v.push_back(N(rng));
        const GridPath x = linear(v);
        for (int k = 0; k < 100; ++k) {
            double a = U(rng), b = U(rng), c = U(rng);
            if (a > b) std::swap(a, b);
            if (b > c) std::swap(b, c);
            if (a > b) std::swap(a, b);
            EXPECT_LE(control_eval(x, p, a, b) + control_eval(x, p, b, c), control_eval(x, p, a, c) * (1 + 1e-12) + 1e-12);
        }
    }
}

TEST(Partition, NothingToSplit) {
    const Partition part = find_partition(GridPath::constant(1.0, scalar_vec(0.0)), GridPath::identity(1.0), 1.0, 1.0);
    EXPECT_EQ(part.breakpoints, (std::vector<double>{0.0, 1.0}));
}

TEST(Partition, LargeJumpBecomesBoundary) {
    const Partition part = find_partition(pure_jump(1.0, {{0.37, 3.0}}), GridPath::constant(1.0, scalar_vec(0.0)), 1.0, 0.1);
    EXPECT_NE(std::find(part.breakpoints.begin(), part.breakpoints.end(), 0.37), part.breakpoints.end());
    EXPECT_EQ(part.forced_cells, 0u);
}

TEST(Partition, ZigzagFourIntervals) {
    DriverSpec d;
    d.kind = DriverKind::Zigzag;
    d.zigzag_values = {0.0, 1.0, 0.0, 1.0, 0.0};
    const Partition part = find_partition(generate(d), GridPath::identity(1.0), 1.0, 1.1);
    EXPECT_EQ(part.intervals(), 4u);
}

TEST(Partition, IntervalsRespectSmallness) {
    DriverSpec d;
    d.kind = DriverKind::Zigzag;
    d.zigzag_values = {0.0, 0.25, 0.05, 0.28, 0.0, 0.2, -0.05};
    const GridPath W = combine(generate(d), 1.0, pure_jump(1.0, {{0.45, 0.9}}), 1.0);
    const double eps = 0.3;
    const Partition part = find_partition(W, GridPath::identity(1.0), 1.0, eps);
    EXPECT_EQ(part.forced_cells, 0u);
    for (std::size_t k = 0; k + 1 < part.breakpoints.size(); ++k) {
        const double a = part.breakpoints[k], b = part.breakpoints[k + 1];
        EXPECT_LE(p_variation(W, 1.0, a, b, Endpoint::OpenLeft), eps + 1e-12);
        EXPECT_LE(b - a, eps + 1e-12);
    }
}

TEST(Partition, RejectsNonPositiveEpsilon) {
    EXPECT_THROW(find_partition(GridPath::identity(1.0), GridPath::identity(1.0), 1.0, 0.0), std::invalid_argument);
}

TEST(TreeNorms, ConstantFieldHasZeroPVariation) {
    const TreeModel tree = uniform_tree(1.0, 6);
    NodeField Y(tree, 1);
    for (auto& row : Y.data) std::fill(row.begin(), row.end(), 4.0);
    EXPECT_EQ(p2_norm_estimate(tree, Y, 2.0).value, 0.0);
}

TEST(TreeNorms, UnitZHasUnitBmo) {
    const TreeModel tree = uniform_tree(1.0, 8);
    NodeField Z(tree, 1);
    for (auto& row : Z.data) std::fill(row.begin(), row.end(), 1.0);
    EXPECT_NEAR(bmo_norm_estimate(tree, Z), 1.0, 1e-14);
}

TEST(TreeNorms, BrownianTwoVariationMatchesEnumeration) {
    const int n = 4;
    const TreeModel tree = uniform_tree(1.0, n);
    NodeField Y(tree, 1);
    for (std::size_t s = 0; s < tree.slices(); ++s)
        for (int j = 0; j < tree.nodes(s); ++j) Y.at(s, j)(0) = tree.brownian_value(s, j);
    // brute force: for every node, average ‖B‖²_{2;[s,T]} over all continuations
    double best = 0.0;
    for (std::size_t s = 0; s < tree.slices(); ++s)
        for (int j = 0; j < tree.nodes(s); ++j) {
            const int rest = n - static_cast<int>(s);
            double acc = 0.0;
            for (int mask = 0; mask < (1 << rest); ++mask) {
                std::vector<Vec> pts{scalar_vec(tree.brownian_value(s, j))};
                int node = j;
                for (int k = 0; k < rest; ++k) {
                    node += (mask >> k) & 1;
                    pts.push_back(scalar_vec(tree.brownian_value(s + static_cast<std::size_t>(k) + 1, node)));
                }
                acc += std::pow(pvar_sequence(pts, 2.0), 2.0);
            }
            best = std::max(best, std::sqrt(acc / (1 << rest)));
        }
    const NormEstimate est = p2_norm_estimate(tree, Y, 2.0);
    EXPECT_TRUE(est.exact);
    EXPECT_NEAR(est.value, best, 1e-12);
}

TEST(TreeNorms, SolvedFieldBoundedByTerminalPlusNorm) {
    Problem pr;
    pr.xi = Terminal::sine(scalar_vec(0.5), scalar_vec(1.0));
    pr.f = Generator::affine(scalar_vec(0.1), -0.5, 0.0);
    const Solution s = solve_rbsde(pr, {10});
    const std::size_t last = s.tree.slices() - 1;
    double xi_sup = 0.0, y_sup = 0.0;
    for (int j = 0; j < s.tree.nodes(last); ++j) xi_sup = std::max(xi_sup, std::abs(s.Y.at(last, j)(0)));
    for (std::size_t t = 0; t < s.tree.slices(); ++t)
        for (int j = 0; j < s.tree.nodes(t); ++j) y_sup = std::max(y_sup, std::abs(s.Y.at(t, j)(0)));
    EXPECT_LE(y_sup, xi_sup + p2_norm_estimate(s.tree, s.Y, 3.0).value + 1e-12);
}
