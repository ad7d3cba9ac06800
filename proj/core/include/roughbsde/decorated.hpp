#pragma once

#include "roughbsde/grid_path.hpp"
#include "roughbsde/rbsde.hpp"
#include "roughbsde/vector_field.hpp"

#include <vector>

namespace roughbsde {

/// Càglàd base path plus an excursion Φ(t)(·) on [0, 1] at each t in Π.
///
/// Excursions are stored as samples Φ(t)(u_k), u_k = k/m, linear in between.
/// Convention: Φ(t)(0) = h(t+) always; ι has Φ(t)(u) = h(t+), ȷ has
/// Φ(t)(u) = (1−u)h(t+) + u·h(t), so Φ(t)(1) = h(t). The δ-extension plays an
/// excursion from u = 1 down to u = 0, which makes ȷ excursions continuous.
struct DecoratedPath {
    GridPath base;
    std::vector<double> jump_set;
    std::vector<std::vector<Vec>> excursions;

    int dim() const { return base.dim(); }
    std::size_t jumps() const { return jump_set.size(); }
    /// Φ(t_k)(u) by linear interpolation of the samples.
    Vec excursion_at(std::size_t k, double u) const;
    /// Throws unless Π ⊆ grid, Π ⊇ jump set of base, Φ(t)(0) = h(t+).
    void validate() const;
};

/// ι h: constant excursions at h(t+). `samples` ≥ 2 points per excursion.
DecoratedPath embed_iota(const GridPath& h, int samples = 2);
/// ȷ h: linear excursions between h(t+) and h(t).
DecoratedPath embed_jmath(const GridPath& h, int samples = 2);

/// Fictitious-time weights r_k = 2^{−k}δ/r, r = Σ_{j=1}^m 2^{−j}, in jump order.
std::vector<double> tau_weights(std::size_t m, double delta);

/// τ^δ(t) = t + Σ_k r_k 1{t_k < t}.
struct TauMap {
    std::vector<double> jumps;
    std::vector<double> weights;
    double delta = 0.0;
    double horizon = 0.0;

    double operator()(double t) const;
    /// τ^δ(t+) = t + Σ_k r_k 1{t_k ≤ t}.
    double right(double t) const;
    double extended_horizon() const { return horizon + delta; }
};

TauMap tau_delta(const std::vector<double>& jump_set, double delta, double horizon);

struct DeltaExtension {
    GridPath path;  ///< Φ^δ on [0, T+δ], caglad-piecewise-linear
    TauMap tau;
};

/// Φ^δ: base path at s = τ^δ(t); on (τ(t_k), τ(t_k+)] the excursion plays as
/// Φ(t_k)((τ(t_k+) − s)/r_k). Without jumps the path gets a constant tail.
DeltaExtension delta_extension(const DecoratedPath& phi, double delta);

/// (Φ^δ ∘ τ^δ)(t) at each t.
std::vector<Vec> retract(const DeltaExtension& ext, const std::vector<double>& times);

/// Decorated lift of a solution path: Π = jumps of W and Y. Marcus
/// excursions are the flow φ(g_tΔW_t, Y_{t+}, u); forward excursions are
/// constant at Y_{t+}.
DecoratedPath lift_solution(const GridPath& Y, const VectorField& g, const GridPath& W, JumpMode mode,
                            int samples = 9);

/// x∘λ for continuous piecewise-linear λ: [0, S] → [0, T], exact on the
/// merged breakpoints when x is piecewise linear.
GridPath compose(const GridPath& x, const GridPath& lambda);

}  // namespace roughbsde
