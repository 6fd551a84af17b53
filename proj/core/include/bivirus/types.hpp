#ifndef BIVIRUS_TYPES_HPP
#define BIVIRUS_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace bivirus {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Bad input: violated precondition, malformed config, dimension mismatch.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure: non-convergence, residual out of tolerance, divergence.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace bivirus

#endif
