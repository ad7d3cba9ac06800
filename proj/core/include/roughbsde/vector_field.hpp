#pragma once

#include "roughbsde/types.hpp"

#include <string>
#include <vector>

namespace roughbsde {

/// Continuous time modulation σ(t) = 1 + amplitude·sin(2π·frequency·t).
struct TimeModulation {
    double amplitude = 0.0;
    double frequency = 0.0;

    double eval(double t) const;
    double sup() const;
    /// Total variation over [0, T]; dominates every p-variation with p ≥ 1.
    double variation_bound(double horizon) const;
};

/// g_t(y) ∈ L(R^e, R^h) from a builtin family.
///
/// Constant:      g(y) = G (h×e).
/// Linear:        g(y)w = Σ_k w_k B_k y, one h×h matrix per driver component.
/// SmoothBounded: (g(y)w)_i = Σ_k A_ik sin(y_i + P_ik) w_k.
class VectorField {
public:
    enum class Family { Constant, Linear, SmoothBounded };

    VectorField() = default;
    static VectorField constant(Mat G);
    static VectorField linear(std::vector<Mat> B);
    static VectorField smooth_bounded(Mat amplitude, Mat phase);
    static VectorField zero(int h, int e) { return constant(Mat::Zero(h, e)); }

    VectorField with_modulation(TimeModulation m) const;

    Family family() const { return family_; }
    std::string family_name() const;
    int h() const { return h_; }
    int e() const { return e_; }
    const TimeModulation& modulation() const { return modulation_; }
    const Mat& constant_matrix() const { return mats_.front(); }
    const std::vector<Mat>& linear_matrices() const { return mats_; }
    bool is_zero() const;

    /// g_t(y) as an h×e matrix.
    Mat eval(double t, const Vec& y) const;
    /// g_t(y)·dw.
    Vec apply(double t, const Vec& y, const Vec& dw) const;
    /// For the linear family, the h×h generator Σ_k dw_k B_k (scaled by σ(t)).
    Mat linear_generator(double t, const Vec& dw) const;

    /// Declared C_g ≥ |g|_∞ + |Dg|_∞ + |D²g|_∞ (times sup σ). For the linear
    /// family |g| is unbounded and C_g is its Lipschitz constant.
    double bound() const;
    /// Declared [[g]]_{p,2}-type time seminorm: (sup_y |g(y)|)·TV(σ).
    double time_seminorm(double horizon) const;

private:
    Family family_ = Family::Constant;
    int h_ = 0;
    int e_ = 0;
    std::vector<Mat> mats_;
    Mat phase_;
    TimeModulation modulation_;
};

/// f(t, y, z) from a builtin family (z has the shape of Y since d = 1).
struct Generator {
    enum class Family { Zero, Linear, Affine };
    Family family = Family::Zero;
    double k = 0.0;  ///< Linear: f = k·y
    Vec a;           ///< Affine: f = a + b·y + c·z
    double b = 0.0;
    double c = 0.0;

    static Generator zero() { return {}; }
    static Generator linear(double k);
    static Generator affine(Vec a, double b, double c);

    Vec eval(double t, const Vec& y, const Vec& z) const;
    /// max(|f(t,0,0)|, Lipschitz constant).
    double bound() const;
    bool depends_on_z() const { return family == Family::Affine && c != 0.0; }
    bool is_zero() const;
    std::string family_name() const;
};

/// ξ as a function of the terminal Brownian value B_T.
struct Terminal {
    enum class Family { Constant, Affine, Sine };
    Family family = Family::Constant;
    Vec a;
    Vec b;

    static Terminal constant(Vec a);
    static Terminal affine(Vec a, Vec b);
    static Terminal sine(Vec a, Vec b);

    Vec eval(double bT) const;
    int dim() const { return static_cast<int>(a.size()); }
    bool is_deterministic() const;
    std::string family_name() const;
};

}  // namespace roughbsde
