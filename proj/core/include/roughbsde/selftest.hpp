#pragma once

#include <string>
#include <vector>

namespace roughbsde {

/// Closed-form reference values the checks compare against.
struct ConstantTable {
    double exp_minus_one;        ///< Y₀ of the drift-only problem f(y) = −y, ξ = 1
    double ln2;                  ///< jump size of the linear-field problems
    double marcus_pre_jump;      ///< ξe^{ln 2} = 2
    double forward_pre_jump;     ///< 1 + ln 2
    double t_dt;                 ///< ∫₀¹ t dt
    double cosh_half;            ///< cosh(0.5), two-point BDSDE mean
    double iota_vs_jmath;        ///< α_∞ between ι and ȷ lifts of a unit step

    static ConstantTable defaults();
};

struct CheckResult {
    std::string name;  ///< module.check
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
    double seconds = 0.0;
};

struct SelftestReport {
    std::vector<CheckResult> checks;
    bool passed() const;
    std::vector<std::string> failed() const;
};

struct SelftestOptions {
    bool include_stability = true;  ///< the Wong–Zakai ladder takes tens of seconds
    ConstantTable constants = ConstantTable::defaults();
};

/// Runs every module's invariant checks; an exception inside a check fails it.
SelftestReport selftest(const SelftestOptions& options = {});

}  // namespace roughbsde
