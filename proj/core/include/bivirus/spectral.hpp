#ifndef BIVIRUS_SPECTRAL_HPP
#define BIVIRUS_SPECTRAL_HPP

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "bivirus/types.hpp"

namespace bivirus {

struct SpectrumResult {
    std::vector<std::complex<double>> eigenvalues; // ordered by (Re desc, Im desc)
    double max_real_part = 0.0;
    double radius = 0.0;
};

/// Perron root and strictly positive eigenvector (unit max entry) of an
/// irreducible nonnegative matrix. Power iteration on M + I; converged when
/// the Collatz-Wielandt bounds pin the root to relative width 1e-12.
std::pair<double, Vector> spectral_radius_nonneg(const Matrix& m);

/// Spectral abscissa s(M) of an irreducible Metzler matrix, computed as
/// rho(M + phi*I) - phi with phi = max(0, -min_ii M) + 1.
double spectral_abscissa_metzler(const Matrix& m);

/// Same, also returning the Perron vector (strictly positive, unit max entry).
std::pair<double, Vector> spectral_abscissa_metzler_with_vector(const Matrix& m);

/// All eigenvalues of a real square matrix (dense QR, via Eigen).
SpectrumResult eigen_all(const Matrix& m);

struct ThresholdIndicators {
    double s = 0.0;                  // s(-D + B)
    std::optional<double> rho;       // rho(D^{-1} B), defined when all delta > 0
    bool critical = false;           // |s| < 1e-9
};

/// Epidemic threshold indicators for healing rates delta and infection
/// matrix B. Cross-checks sign(s) against sign(rho - 1) when rho is defined.
ThresholdIndicators threshold_indicators(const Vector& delta, const Matrix& beta);

inline constexpr double kCriticalBand = 1e-9;

} // namespace bivirus

#endif
