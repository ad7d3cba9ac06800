#pragma once

#include "roughbsde/metric.hpp"
#include "roughbsde/rbsde.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace roughbsde {

// ---------------------------------------------------------------------------
// Wong–Zakai stability experiment

struct StabilityConfig {
    Problem limit;                       ///< problem with the discontinuous driver
    std::vector<double> meshes{0.2, 0.1, 0.05, 0.025};
    int steps = 200;                     ///< Brownian steps of every tree
    int n_path_samples = 64;             ///< tree paths drawn when the tree is too deep to enumerate
    double p = 3.0;                      ///< exponent of the metric on Y
    double q = 1.0;                      ///< exponent of the metric on W
    std::vector<double> delta_schedule{0.01};
    std::uint64_t seed = 11;
    int excursion_samples = 9;
    AlphaOptions alpha{4, 1, 12};
    SolverOptions solver;
};

struct StabilityRow {
    double mesh = 0.0;
    double mean_alpha_y = 0.0;  ///< probability-weighted mean of α_p(𝐘ᵏ, 𝐘^∞) over tree paths
    double q90_alpha_y = 0.0;
    double z_l2 = 0.0;          ///< E∫(Zᵏ − Z^∞)² dc, exact on the tree
    double alpha_w = 0.0;       ///< α_q(ι Wᵏ, 𝐖^∞)
};

struct StabilityReport {
    std::vector<StabilityRow> rows;
    bool exact_paths = false;   ///< all tree paths enumerated
    std::size_t paths = 0;
    bool alpha_y_decreasing = false;
    bool alpha_w_decreasing = false;
    bool z_decreasing = false;
    bool final_third = false;   ///< last mean α_p ≤ first / 3
    bool passed() const { return alpha_y_decreasing && alpha_w_decreasing && z_decreasing && final_third; }
};

/// Limit problem (𝐖^∞ = ȷW for Marcus, ιW for forward) against Wong–Zakai
/// smoothings Wᵏ (𝐖ᵏ = ιWᵏ) solved on trees with the same Brownian steps.
StabilityReport stability_experiment(const StabilityConfig& config);

// ---------------------------------------------------------------------------
// Pathwise Itô formula and quadratic variation checks

enum class ScalarFunction { Linear, Square, ExpClipped, Sin };

std::string_view to_string(ScalarFunction f);
ScalarFunction parse_scalar_function(std::string_view text);

/// f, f′, f″ of the builtin C² functions (ExpClipped throws for |x| > 30).
double eval_function(ScalarFunction f, double x, int derivative = 0);

/// Random-walk path of the binomial tree on [0, T]: one ±√dt step per bit.
std::vector<double> tree_brownian(const std::vector<std::uint8_t>& ups, double horizon);

/// sup over grid times t of |f(Y_t) − f(Y_0) − ∫₀ᵗ f′(Y) d←A − Σ f′(Y_{u+})ΔM
/// − ½Σ f″(Y_{u+})ΔM² − Σ_jumps (f(Y_{u+}) − f(Y_u) − f′(Y_{u+})Δ⁺A_u)|, Y = M + A,
/// on the tree grid merged with A's grid (M constant between tree times).
/// M may be empty (M ≡ 0, grid of A only).
double ito_residual(ScalarFunction f, const GridPath& A, const std::vector<double>& M, double horizon);

struct QvLadder {
    std::vector<int> strides;
    std::vector<double> rms_residual;  ///< RMS over tree paths of S^π(T) − ([M]_T + Σ(Δ⁺A)²)
    double jump_part = 0.0;            ///< Σ(Δ⁺A)²
    bool monotone = false;
};

/// Quadratic variation of M + A along partitions of the tree grid thinned by
/// each stride; n_paths = 0 uses M ≡ 0.
QvLadder qv_check(const GridPath& A, int steps, const std::vector<int>& strides, int n_paths,
                  std::uint64_t seed = 5);

}  // namespace roughbsde
