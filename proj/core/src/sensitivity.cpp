#include "bivirus/sensitivity.hpp"

#include <Eigen/LU>

#include "bivirus/dynamics.hpp"
#include "bivirus/equilibria.hpp"
#include "bivirus/spectral.hpp"

namespace bivirus {

SensitivitySystem make_sensitivity_system(const Vector& delta, const Matrix& beta, const Vector& x_star) {
    const auto n = delta.size();
    if (beta.rows() != n || beta.cols() != n || x_star.size() != n)
        throw ValidationError("make_sensitivity_system: dimension mismatch");
    if ((delta.array() <= 0.0).any())
        throw ValidationError("make_sensitivity_system: healing rates must be strictly positive");
    const ThresholdIndicators ind = threshold_indicators(delta, beta);
    if (!ind.rho || *ind.rho <= 1.0)
        throw ValidationError("make_sensitivity_system: system must be supercritical (rho(D^-1 B) > 1)");
    const double residual = rhs_single(delta, beta, x_star).lpNorm<Eigen::Infinity>();
    if (residual > kEquilibriumResidualTol)
        throw ValidationError("make_sensitivity_system: x* residual " + std::to_string(residual) +
                              " above tolerance");

    SensitivitySystem sys;
    sys.delta = delta;
    sys.beta = beta;
    sys.x_star = x_star;
    sys.core = (Vector::Ones(n) - x_star).asDiagonal() * beta;
    sys.core.diagonal() -= delta + beta * x_star;
    sys.core_abscissa = spectral_abscissa_metzler(sys.core);
    if (sys.core_abscissa >= 0.0)
        throw NumericError("make_sensitivity_system: solve matrix is not Hurwitz (s = " +
                           std::to_string(sys.core_abscissa) + ")");
    return sys;
}

Vector sensitivity_solve(const SensitivitySystem& sys, const Vector& delta_perturbation,
                         const Matrix& beta_perturbation) {
    const auto n = sys.delta.size();
    if (delta_perturbation.size() != n || beta_perturbation.rows() != n || beta_perturbation.cols() != n)
        throw ValidationError("sensitivity_solve: dimension mismatch");
    const Vector rhs = sys.x_star.cwiseProduct(delta_perturbation) +
                       (sys.x_star - Vector::Ones(n)).cwiseProduct(beta_perturbation * sys.x_star);
    Eigen::PartialPivLU<Matrix> lu(sys.core);
    const Vector dx = lu.solve(rhs);
    if (!dx.allFinite())
        throw NumericError("sensitivity_solve: singular solve matrix (contradicts s(M) < 0)");
    return dx;
}

std::pair<Matrix, Matrix> sensitivity_jacobians(const SensitivitySystem& sys) {
    const auto n = sys.delta.size();
    Eigen::PartialPivLU<Matrix> lu(sys.core);
    const Matrix core_inv = lu.inverse();
    if (!core_inv.allFinite()) throw NumericError("sensitivity_jacobians: singular solve matrix");

    // Column for delta_i: M^{-1} X* e_i.
    Matrix d_delta = core_inv * Matrix(sys.x_star.asDiagonal());
    // Column for beta_ij: M^{-1} (X* - I) e_i x*_j, laid out at column i*n + j.
    Matrix d_beta(n, n * n);
    const Vector scale = sys.x_star - Vector::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector col_i = core_inv.col(i) * scale(i);
        for (Eigen::Index j = 0; j < n; ++j) d_beta.col(i * n + j) = col_i * sys.x_star(j);
    }
    return {std::move(d_delta), std::move(d_beta)};
}

std::pair<Matrix, Matrix> sensitivity_jacobians(const Vector& delta, const Matrix& beta) {
    const Vector x_star = single_virus_equilibrium(delta, beta);
    return sensitivity_jacobians(make_sensitivity_system(delta, beta, x_star));
}

} // namespace bivirus
