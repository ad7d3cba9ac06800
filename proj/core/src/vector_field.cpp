#include "roughbsde/vector_field.hpp"

#include <cmath>
#include <numbers>

namespace roughbsde {

double TimeModulation::eval(double t) const {
    return 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * frequency * t);
}

double TimeModulation::sup() const { return 1.0 + std::abs(amplitude); }

double TimeModulation::variation_bound(double horizon) const {
    if (amplitude == 0.0 || frequency == 0.0) return 0.0;
    return 4.0 * std::abs(amplitude) * (std::abs(frequency) * horizon + 1.0);
}

VectorField VectorField::constant(Mat G) {
    VectorField v;
    v.family_ = Family::Constant;
    v.h_ = static_cast<int>(G.rows());
    v.e_ = static_cast<int>(G.cols());
    v.mats_ = {std::move(G)};
    return v;
}

VectorField VectorField::linear(std::vector<Mat> B) {
    if (B.empty()) throw std::invalid_argument("linear field needs one matrix per driver component");
    VectorField v;
    v.family_ = Family::Linear;
    v.h_ = static_cast<int>(B.front().rows());
    v.e_ = static_cast<int>(B.size());
    for (const Mat& m : B)
        if (m.rows() != v.h_ || m.cols() != v.h_) throw std::invalid_argument("linear field matrices must be h×h");
    v.mats_ = std::move(B);
    return v;
}

VectorField VectorField::smooth_bounded(Mat amplitude, Mat phase) {
    if (amplitude.rows() != phase.rows() || amplitude.cols() != phase.cols())
        throw std::invalid_argument("smooth-bounded field: amplitude/phase shape mismatch");
    VectorField v;
    v.family_ = Family::SmoothBounded;
    v.h_ = static_cast<int>(amplitude.rows());
    v.e_ = static_cast<int>(amplitude.cols());
    v.mats_ = {std::move(amplitude)};
    v.phase_ = std::move(phase);
    return v;
}

VectorField VectorField::with_modulation(TimeModulation m) const {
    VectorField v = *this;
    v.modulation_ = m;
    return v;
}

std::string VectorField::family_name() const {
    switch (family_) {
        case Family::Constant: return "constant";
        case Family::Linear: return "linear";
        case Family::SmoothBounded: return "smooth";
    }
    return "unknown";
}

bool VectorField::is_zero() const {
    for (const Mat& m : mats_)
        if (!m.isZero(0.0)) return false;
    return true;
}

Mat VectorField::eval(double t, const Vec& y) const {
    if (y.size() != h_) throw std::invalid_argument("vector field: state dimension mismatch");
    const double s = modulation_.eval(t);
    Mat out(h_, e_);
    switch (family_) {
        case Family::Constant:
            out = s * mats_.front();
            break;
        case Family::Linear:
            for (int k = 0; k < e_; ++k) out.col(k) = s * (mats_[static_cast<std::size_t>(k)] * y);
            break;
        case Family::SmoothBounded:
            for (int i = 0; i < h_; ++i)
                for (int k = 0; k < e_; ++k) out(i, k) = s * mats_.front()(i, k) * std::sin(y(i) + phase_(i, k));
            break;
    }
    if (!out.allFinite()) throw std::runtime_error("vector field evaluated to a non-finite value");
    return out;
}

Vec VectorField::apply(double t, const Vec& y, const Vec& dw) const {
    if (dw.size() != e_) throw std::invalid_argument("vector field: driver dimension mismatch");
    if (family_ == Family::Linear) return linear_generator(t, dw) * y;
    return eval(t, y) * dw;
}

Mat VectorField::linear_generator(double t, const Vec& dw) const {
    if (family_ != Family::Linear) throw std::logic_error("linear_generator: not a linear field");
    Mat A = Mat::Zero(h_, h_);
    for (int k = 0; k < e_; ++k) A += dw(k) * mats_[static_cast<std::size_t>(k)];
    return modulation_.eval(t) * A;
}

double VectorField::bound() const {
    double base = 0.0;
    switch (family_) {
        case Family::Constant: base = mats_.front().norm(); break;
        case Family::Linear:
            for (const Mat& m : mats_) base += m.norm();
            break;
        case Family::SmoothBounded: base = 3.0 * mats_.front().norm(); break;
    }
    return base * modulation_.sup();
}

double VectorField::time_seminorm(double horizon) const {
    double sup_g = family_ == Family::Linear ? bound() / modulation_.sup() : mats_.front().norm();
    if (family_ == Family::SmoothBounded) sup_g = mats_.front().norm();
    return sup_g * modulation_.variation_bound(horizon);
}

Generator Generator::linear(double k) {
    Generator g;
    g.family = Family::Linear;
    g.k = k;
    return g;
}

Generator Generator::affine(Vec a, double b, double c) {
    Generator g;
    g.family = Family::Affine;
    g.a = std::move(a);
    g.b = b;
    g.c = c;
    return g;
}

Vec Generator::eval(double, const Vec& y, const Vec& z) const {
    switch (family) {
        case Family::Zero: return Vec::Zero(y.size());
        case Family::Linear: return k * y;
        case Family::Affine: return a + b * y + c * z;
    }
    return Vec::Zero(y.size());
}

double Generator::bound() const {
    switch (family) {
        case Family::Zero: return 0.0;
        case Family::Linear: return std::abs(k);
        case Family::Affine: return std::max({a.norm(), std::abs(b), std::abs(c)});
    }
    return 0.0;
}

bool Generator::is_zero() const {
    switch (family) {
        case Family::Zero: return true;
        case Family::Linear: return k == 0.0;
        case Family::Affine: return a.isZero(0.0) && b == 0.0 && c == 0.0;
    }
    return true;
}

std::string Generator::family_name() const {
    switch (family) {
        case Family::Zero: return "zero";
        case Family::Linear: return "linear";
        case Family::Affine: return "affine";
    }
    return "unknown";
}

Terminal Terminal::constant(Vec a) {
    Terminal x;
    x.family = Family::Constant;
    x.b = Vec::Zero(a.size());
    x.a = std::move(a);
    return x;
}

Terminal Terminal::affine(Vec a, Vec b) {
    if (a.size() != b.size()) throw std::invalid_argument("terminal: a/b size mismatch");
    Terminal x;
    x.family = Family::Affine;
    x.a = std::move(a);
    x.b = std::move(b);
    return x;
}

Terminal Terminal::sine(Vec a, Vec b) {
    if (a.size() != b.size()) throw std::invalid_argument("terminal: a/b size mismatch");
    Terminal x;
    x.family = Family::Sine;
    x.a = std::move(a);
    x.b = std::move(b);
    return x;
}

Vec Terminal::eval(double bT) const {
    switch (family) {
        case Family::Constant: return a;
        case Family::Affine: return a + bT * b;
        case Family::Sine: return a + std::sin(bT) * b;
    }
    return a;
}

bool Terminal::is_deterministic() const { return family == Family::Constant || b.isZero(0.0); }

std::string Terminal::family_name() const {
    switch (family) {
        case Family::Constant: return "constant";
        case Family::Affine: return "affine";
        case Family::Sine: return "sine";
    }
    return "unknown";
}

}  // namespace roughbsde
