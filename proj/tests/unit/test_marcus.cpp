#include "roughbsde/drivers.hpp"
#include "roughbsde/marcus.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace roughbsde;

TEST(Flow, ZeroJumpIsStationary) {
    const VectorField g = VectorField::smooth_bounded(Mat::Constant(1, 1, 0.8), Mat::Constant(1, 1, 0.3));
    EXPECT_EQ(flow(g, 0.0, scalar_vec(0.0), scalar_vec(1.7))(0), 1.7);
}

TEST(Flow, LinearClosedForm) {
    const VectorField g = VectorField::linear({Mat::Identity(1, 1)});
    EXPECT_NEAR(flow(g, 0.0, scalar_vec(std::log(2.0)), scalar_vec(1.0))(0), 2.0, 1e-14);
    EXPECT_NEAR(flow(g, 0.0, scalar_vec(std::log(2.0)), scalar_vec(1.0), 1.0, 64, FlowMethod::RungeKutta)(0), 2.0,
                1e-9);
}

TEST(Flow, ConstantFieldIsLinearInTime) {
    const VectorField g = VectorField::constant(Mat::Constant(1, 1, 3.0));
    EXPECT_DOUBLE_EQ(flow(g, 0.0, scalar_vec(0.5), scalar_vec(0.0))(0), 1.5);
}

TEST(Flow, MatrixExponentialForRotation) {
    Mat J(2, 2);
    J << 0.0, -1.0, 1.0, 0.0;
    const Mat R = expm(J * M_PI / 2.0);
    EXPECT_NEAR(R(0, 0), 0.0, 1e-14);
    EXPECT_NEAR(R(1, 0), 1.0, 1e-14);
    const VectorField g = VectorField::linear({J});
    const Vec y = flow(g, 0.0, scalar_vec(M_PI), (Vec(2) << 1.0, 0.0).finished(), 1.0, 256, FlowMethod::RungeKutta);
    EXPECT_NEAR(y(0), -1.0, 1e-9);
    EXPECT_NEAR(y(1), 0.0, 1e-9);
}

TEST(Flow, FourthOrderConvergence) {
    const VectorField g = VectorField::linear({Mat::Constant(1, 1, 1.3)});
    const double exact = 0.7 * std::exp(1.3);
    double prev = 0.0;
    for (int steps : {8, 16, 32, 64}) {
        const double err =
            std::abs(flow(g, 0.0, scalar_vec(1.0), scalar_vec(0.7), 1.0, steps, FlowMethod::RungeKutta)(0) - exact);
        if (prev > 0.0) EXPECT_NEAR(prev / err, 16.0, 2.0);
        prev = err;
    }
}

TEST(Flow, Semigroup) {
    const VectorField g = VectorField::smooth_bounded(Mat::Constant(1, 1, 0.9), Mat::Constant(1, 1, -0.4));
    const Vec x = scalar_vec(0.3), dw = scalar_vec(1.4);
    for (double s : {0.2, 0.35, 0.5}) {
        const Vec whole = flow(g, 0.0, dw, x, 1.0, 64);
        const Vec split = flow(g, 0.0, dw, flow(g, 0.0, dw, x, s, 64), 1.0 - s, 64);
        EXPECT_LE((whole - split).norm(), 1e-9);
    }
}

TEST(Flow, GronwallLipschitz) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const VectorField g = VectorField::smooth_bounded(Mat::Constant(1, 1, 0.7), Mat::Constant(1, 1, 0.1));
    for (int k = 0; k < 50; ++k) {
        const Vec x = scalar_vec(2 * U(rng)), xp = scalar_vec(2 * U(rng)), dw = scalar_vec(2 * U(rng));
        const double lhs = (flow(g, 0.0, dw, x) - flow(g, 0.0, dw, xp)).norm();
        EXPECT_LE(lhs, (x - xp).norm() * std::exp(g.bound() * dw.norm()) * (1 + 1e-9));
    }
}

TEST(Flow, RejectsNonFiniteInput) {
    const VectorField g = VectorField::smooth_bounded(Mat::Constant(1, 1, 0.7), Mat::Constant(1, 1, 0.1));
    EXPECT_ANY_THROW(flow(g, 0.0, scalar_vec(1.0), scalar_vec(std::nan(""))));
}

TEST(MarcusCorrection, VanishesForConstantField) {
    const VectorField g = VectorField::constant(Mat::Constant(1, 1, 2.0));
    EXPECT_NEAR(marcus_correction(g, 0.0, scalar_vec(0.4), scalar_vec(1.3))(0), 0.0, 1e-14);
}

TEST(MarcusCorrection, LinearClosedForm) {
    const VectorField g = VectorField::linear({Mat::Identity(1, 1)});
    const double w = 0.8, y = 1.5;
    EXPECT_NEAR(marcus_correction(g, 0.0, scalar_vec(y), scalar_vec(w))(0), y * (std::exp(w) - 1 - w), 1e-13);
}

TEST(MarcusCorrection, ZeroJump) {
    const VectorField g = VectorField::smooth_bounded(Mat::Constant(1, 1, 0.8), Mat::Constant(1, 1, 0.3));
    EXPECT_EQ(marcus_correction(g, 0.0, scalar_vec(0.2), scalar_vec(0.0))(0), 0.0);
}

TEST(MarcusCorrection, TaylorBound) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const VectorField g = VectorField::smooth_bounded(Mat::Constant(1, 1, std::abs(U(rng))),
                                                          Mat::Constant(1, 1, 3 * U(rng)));
        const Vec y = scalar_vec(3 * U(rng)), dw = scalar_vec(2 * U(rng));
        EXPECT_LE(marcus_correction(g, 0.0, y, dw).norm(), 0.5 * g.bound() * g.bound() * dw.squaredNorm());
    }
}

TEST(Diamond, ContinuousDriverEqualsYoung) {
    const VectorField g = VectorField::smooth_bounded(Mat::Constant(1, 1, 0.5), Mat::Constant(1, 1, 0.0));
    DriverSpec d;
    d.kind = DriverKind::Zigzag;
    d.zigzag_values = {0.0, 0.3, -0.1, 0.2};
    const GridPath W = generate(d);
    const GridPath Y = GridPath::continuous_scalar(W.times(), {0.1, 0.2, 0.3, 0.4});
    std::vector<Vec> gy;
    for (std::size_t i = 0; i < Y.size(); ++i) gy.push_back(g.eval(0.0, Y.at(i)).col(0));
    const GridPath G = GridPath::continuous(Y.times(), gy);
    EXPECT_NEAR(diamond_integral(g, Y, W).total(0), backward_young(G, W).total(0), 1e-14);
}

TEST(Diamond, ConstantFieldIgnoresCorrection) {
    const VectorField g = VectorField::constant(Mat::Constant(1, 1, 2.0));
    const GridPath W = pure_jump(1.0, {{0.3, 1.0}, {0.6, -0.5}});
    const GridPath Y = pure_jump(1.0, {{0.5, 1.0}});
    EXPECT_NEAR(diamond_integral(g, Y, W).total(0), 2.0 * 0.5, 1e-14);
}

TEST(Diamond, LinearSingleJumpCorrection) {
    const VectorField g = VectorField::linear({Mat::Identity(1, 1)});
    const double w = 0.6, y = 1.3;
    const GridPath W = pure_jump(1.0, {{0.5, w}});
    const GridPath Y = GridPath::constant(1.0, scalar_vec(y)).resampled(W.times());
    EXPECT_NEAR(diamond_integral(g, Y, W).total(0), y * w + y * (std::exp(w) - 1 - w), 1e-13);
}
