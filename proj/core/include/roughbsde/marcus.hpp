#pragma once

#include "roughbsde/grid_path.hpp"
#include "roughbsde/vector_field.hpp"
#include "roughbsde/young.hpp"

#include <vector>

namespace roughbsde {

enum class FlowMethod {
    Auto,        ///< closed form for Constant and Linear, RK4 otherwise
    RungeKutta,  ///< always the fixed-step 4th-order integrator
};

/// φ(g_t ΔW, x, duration): solution at `duration` of dy/du = g_t(y)ΔW, y(0) = x.
struct FlowRequest {
    const VectorField* field = nullptr;
    double time = 0.0;
    Vec jump;
    Vec start;
    double duration = 1.0;
    /// Substeps of the one-step method; 0 selects 64 per unit of |ΔW|·duration (at least 8).
    int steps = 0;
    FlowMethod method = FlowMethod::Auto;
};

Vec flow(const FlowRequest& req);
Vec flow(const VectorField& g, double t, const Vec& dw, const Vec& x, double duration = 1.0, int steps = 0,
         FlowMethod method = FlowMethod::Auto);

/// Samples φ(gΔW, x, k/m) for k = 0..m.
std::vector<Vec> flow_samples(const VectorField& g, double t, const Vec& dw, const Vec& x, int m, int steps = 0);

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
Mat expm(const Mat& A);

/// φ(g_tΔW, y⁺) − y⁺ − g_t(y⁺)ΔW.
Vec marcus_correction(const VectorField& g, double t, const Vec& y_plus, const Vec& dw, int steps = 0);

/// ∫ g(Y) ⋄ dW: backward Young sum with integrand g(Y_{r+}) at jumps and g at
/// the right endpoint on continuous cells, plus the Marcus corrections at the
/// jumps of W. Y is h-dimensional, W e-dimensional, both càglàd.
YoungIntegralResult diamond_integral(const VectorField& g, const GridPath& Y, const GridPath& W,
                                     Anchor anchor = Anchor::Left);

}  // namespace roughbsde
