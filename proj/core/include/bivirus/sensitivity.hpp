#ifndef BIVIRUS_SENSITIVITY_HPP
#define BIVIRUS_SENSITIVITY_HPP

#include <utility>

#include "bivirus/types.hpp"

namespace bivirus {

/// First-order response of the single-virus epidemic state x* to rate
/// perturbations, through the linear system
///   M dx = X* dDelta + (X* - I) dB x*,   M = -D + B - X*B - diag(Bx*).
/// M is Hurwitz Metzler at a supercritical equilibrium, hence invertible
/// with strictly negative inverse; this is re-verified at construction.
struct SensitivitySystem {
    Vector delta;
    Matrix beta;
    Vector x_star;
    Matrix core;              // M
    double core_abscissa = 0; // s(M), verified < 0
};

/// Validates the inputs (delta > 0, irreducible B, rho(D^{-1}B) > 1,
/// equilibrium residual <= 1e-10) and assembles the solve matrix.
SensitivitySystem make_sensitivity_system(const Vector& delta, const Matrix& beta, const Vector& x_star);

/// First-order equilibrium shift for the given rate perturbations.
Vector sensitivity_solve(const SensitivitySystem& sys, const Vector& delta_perturbation,
                         const Matrix& beta_perturbation);

/// Assembled Jacobians of x* in the rates: an n x n matrix d(x*)/d(delta)
/// (column i is the response to a unit bump of delta_i) and an n x n^2 matrix
/// d(x*)/d(beta) whose column i*n + j is the response to a unit bump of
/// beta_ij. Every delta column is strictly negative; every beta column on an
/// arc of B is strictly positive.
std::pair<Matrix, Matrix> sensitivity_jacobians(const Vector& delta, const Matrix& beta);
std::pair<Matrix, Matrix> sensitivity_jacobians(const SensitivitySystem& sys);

} // namespace bivirus

#endif
