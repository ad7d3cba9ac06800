#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace roughbsde {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when a problem violates the standing assumptions (regularity
/// pairing, declared bounds, dimensions).
class AssumptionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when the fixed-point iteration does not reach tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Vec scalar_vec(double v) {
    Vec out(1);
    out(0) = v;
    return out;
}

}  // namespace roughbsde
