#pragma once

#include "roughbsde/grid_path.hpp"

namespace roughbsde {

enum class Anchor { Left, Right };

/// Declared regularities of integrand (p) and integrator (q).
struct Regularity {
    double p = 1.0;
    double q = 1.0;
};

/// C_{p,q} = (1 − 2^{1−θ})^{−1}, θ = 1/p + 1/q. Throws unless θ > 1.
double young_loeve_constant(double p, double q);

struct YoungIntegralResult {
    /// t ↦ ∫_0^t (Anchor::Left) or t ↦ ∫_t^T (Anchor::Right) on the merged grid.
    GridPath cumulative;
    /// Young–Loève bound on the endpoint-sum error of the continuous cells.
    double remainder_bound = 0.0;
    /// Integral over [0, T].
    Vec total;
};

/// Backward Young integral ∫ x d←y.
///
/// Jumps of y are resolved exactly: a right jump Δ⁺y(u) is weighted by x(u+),
/// a left jump Δ⁻y(u) by x(u). On each continuous cell of the merged grid the
/// increment of y is weighted by x at the right endpoint. The product is
/// Hadamard, with scalar x or y broadcast.
YoungIntegralResult backward_young(const GridPath& x, const GridPath& y, Anchor anchor = Anchor::Left,
                                   Regularity reg = {});

/// Forward Young integral: left endpoint x(u) for right jumps, x(u−) for left
/// jumps, x at the left endpoint on continuous cells.
YoungIntegralResult forward_young(const GridPath& x, const GridPath& y, Anchor anchor = Anchor::Left,
                                  Regularity reg = {});

enum class JumpSide { Plus, Minus };

/// Σ Δ⁺x Δ⁺y (Plus) or Σ Δ⁻x Δ⁻y (Minus) over the merged grid.
Vec jump_correction(const GridPath& x, const GridPath& y, JumpSide side);

struct DyPlusShift {
    Vec with_plus;  ///< ∫_0^t x dy⁺ (forward, y⁺ the càdlàg version of y)
    Vec plain;      ///< ∫_0^t x dy (forward)
    Vec boundary;   ///< x_t Δ⁺y_t − x_0 Δ⁺y_0
    Vec defect() const { return with_plus - plain - boundary; }
};

/// Both sides of ∫ x dy⁺ = ∫ x dy + x_tΔ⁺y_t − x_0Δ⁺y_0 for càdlàg x and
/// càglàd y. The defect equals −Σ_{0<s≤t} Δ⁻x_s Δ⁺y_s, so it vanishes when x
/// and y share no jump times.
DyPlusShift dy_plus_shift(const GridPath& x, const GridPath& y, double t);
DyPlusShift dy_plus_shift(const GridPath& x, const GridPath& y);

/// |∫ x d(∫ y d←z) − ∫ xy d←z| (Euclidean norm), z càglàd.
double associativity_check(const GridPath& x, const GridPath& y, const GridPath& z);

struct StabilityBound {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// lhs = ‖∫x¹d←y¹ − ∫x²d←y²‖_p,
/// rhs = (1 + C_{p,q})[(‖Δx‖_p + |Δx_T|)‖y¹‖_q + (‖x²‖_p + |x²_T|)‖Δy‖_q].
StabilityBound stability_bound_check(const GridPath& x1, const GridPath& x2, const GridPath& y1,
                                     const GridPath& y2, double p, double q);

}  // namespace roughbsde
