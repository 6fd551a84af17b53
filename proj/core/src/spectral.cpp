#include "bivirus/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bivirus/graph.hpp"

namespace bivirus {

namespace {

constexpr int kMaxPowerIters = 100000;
constexpr double kPowerTol = 1e-12;

void require_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw ValidationError(std::string(who) + ": matrix must be square and nonempty");
}

// Power iteration on a primitive nonnegative matrix. The Collatz-Wielandt
// quotients min_i (Mv)_i / v_i <= rho <= max_i (Mv)_i / v_i bracket the root;
// we stop once the bracket's relative width is below tol.
std::pair<double, Vector> perron_primitive(const Matrix& m) {
    const auto n = m.rows();
    Vector v = Vector::Ones(n);
    v /= v.norm();
    double lo = 0.0, hi = 0.0;
    for (int it = 0; it < kMaxPowerIters; ++it) {
        Vector w = m * v;
        lo = std::numeric_limits<double>::infinity();
        hi = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double q = w(i) / v(i);
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
        v = w / w.norm();
        if (hi - lo <= kPowerTol * std::max(1.0, hi)) {
            const double rho = 0.5 * (lo + hi);
            v /= v.maxCoeff();
            return {rho, v};
        }
    }
    throw NumericError("power iteration did not converge within " + std::to_string(kMaxPowerIters) +
                       " iterations (last bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "])");
}

} // namespace

std::pair<double, Vector> spectral_radius_nonneg(const Matrix& m) {
    require_square(m, "spectral_radius_nonneg");
    if ((m.array() < 0.0).any()) throw ValidationError("spectral_radius_nonneg: negative entries");
    if (!is_irreducible(m)) throw ValidationError("spectral_radius_nonneg: matrix is reducible");
    // +I makes an irreducible nonnegative matrix primitive (positive diagonal).
    auto [rho_shifted, v] = perron_primitive(m + Matrix::Identity(m.rows(), m.cols()));
    return {rho_shifted - 1.0, v};
}

std::pair<double, Vector> spectral_abscissa_metzler_with_vector(const Matrix& m) {
    require_square(m, "spectral_abscissa_metzler");
    const auto n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && m(i, j) < 0.0)
                throw ValidationError("spectral_abscissa_metzler: negative off-diagonal entry");
    // The shift makes the matrix nonnegative with positive diagonal; its graph
    // has the same inter-vertex connectivity as M's off-diagonal pattern.
    const double phi = std::max(0.0, -m.diagonal().minCoeff()) + 1.0;
    const Matrix shifted = m + phi * Matrix::Identity(n, n);
    if (!is_irreducible(shifted))
        throw ValidationError("spectral_abscissa_metzler: matrix is reducible");
    auto [rho, v] = perron_primitive(shifted);
    return {rho - phi, v};
}

double spectral_abscissa_metzler(const Matrix& m) {
    return spectral_abscissa_metzler_with_vector(m).first;
}

SpectrumResult eigen_all(const Matrix& m) {
    require_square(m, "eigen_all");
    Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericError("eigen_all: QR iteration failed to converge (n = " + std::to_string(m.rows()) + ")");
    SpectrumResult out;
    out.eigenvalues.reserve(static_cast<size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.eigenvalues.push_back(solver.eigenvalues()(i));
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  if (a.real() != b.real()) return a.real() > b.real();
                  return a.imag() > b.imag();
              });
    out.max_real_part = out.eigenvalues.front().real();
    out.radius = 0.0;
    for (const auto& ev : out.eigenvalues) out.radius = std::max(out.radius, std::abs(ev));
    return out;
}

ThresholdIndicators threshold_indicators(const Vector& delta, const Matrix& beta) {
    if (delta.size() != beta.rows()) throw ValidationError("threshold_indicators: dimension mismatch");
    if ((delta.array() < 0.0).any()) throw ValidationError("threshold_indicators: negative healing rate");
    ThresholdIndicators out;
    Matrix m = beta;
    m.diagonal() -= delta;
    out.s = spectral_abscissa_metzler(m);
    out.critical = std::abs(out.s) < kCriticalBand;
    if ((delta.array() > 0.0).all()) {
        Matrix ratio = delta.cwiseInverse().asDiagonal() * beta;
        out.rho = spectral_radius_nonneg(ratio).first;
        const double srho = *out.rho - 1.0;
        const bool s_zero = std::abs(out.s) < kCriticalBand;
        const bool r_zero = std::abs(srho) < kCriticalBand;
        if (!s_zero && !r_zero && (out.s > 0) != (srho > 0))
            throw NumericError("threshold_indicators: sign(s) and sign(rho - 1) disagree (s = " +
                               std::to_string(out.s) + ", rho = " + std::to_string(*out.rho) + ")");
    }
    return out;
}

} // namespace bivirus
