#ifndef BIVIRUS_EQUILIBRIA_HPP
#define BIVIRUS_EQUILIBRIA_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bivirus/dynamics.hpp"
#include "bivirus/types.hpp"

namespace bivirus {

/// Parameters of the monotone fixed-point map used by the equilibrium solver.
/// The map lives on the invariant set { epsilon * perron <= x <= 1 }.
struct FixedPointConfig {
    double shift = 0.0;      // c, with 0 < c < s(-D+B)
    double epsilon = 0.0;    // initial scale; epsilon * perron <= (r-1)/r entrywise
    Vector perron;           // Perron vector of (D + cI)^{-1} B, unit max entry
    double rho_shifted = 0.0; // r = rho((D + cI)^{-1} B), > 1 in the supercritical case
    long max_iters = 100000;
    double tol = 1e-12;      // residual threshold on ||rhs_single||_inf
};

/// Default solver parameters: c = s(-D+B)/2, epsilon at half the admissible bound.
/// Throws NumericError("no epidemic state") when s(-D+B) <= 0.
FixedPointConfig make_fixed_point_config(const Vector& delta, const Matrix& beta);

/// The unique strictly positive equilibrium x* of the single-virus dynamics,
/// with ||rhs_single(delta, beta, x*)||_inf <= 1e-10. Requires s(-D+B) > 0
/// and irreducible B.
Vector single_virus_equilibrium(const Vector& delta, const Matrix& beta);

/// Same, with explicit solver parameters and an optional start point inside
/// the invariant set (defaults to epsilon * perron).
Vector single_virus_equilibrium(const Vector& delta, const Matrix& beta, const FixedPointConfig& cfg,
                                const Vector* start = nullptr);

enum class RegimeLabel { HealthyGlobal, Virus1Dominant, Virus2Dominant, BothSupercritical, Critical };
std::string to_string(RegimeLabel label);

/// Regime trichotomy from the signs of s(-D1+B1), s(-D2+B2): both <= 0 is
/// globally healthy, exactly one > 0 gives that virus dominance, both > 0
/// is the multi-equilibria case. Within +-1e-9 of zero the call is Critical.
RegimeLabel classify_regime(const BiVirusSystem& sys);
RegimeLabel classify_regime_from_abscissas(double s1, double s2);

enum class Stability { stable, unstable, marginal };
std::string to_string(Stability s);

struct EquilibriumReport {
    std::string label; // "healthy", "virus1-dominant", "virus2-dominant", "coexistence", "interior"
    EpidemicState point;
    double residual = 0.0;
    std::vector<std::complex<double>> spectrum;
    double max_real_part = 0.0;
    Stability stability = Stability::marginal;
    RegimeLabel regime = RegimeLabel::HealthyGlobal;
};

/// Jacobian of the bi-virus vector field at a point of the domain:
/// [ (I-X1-X2)B1 - D1 - diag(B1 x1),  -diag(B1 x1)
///   -diag(B2 x2),                    (I-X1-X2)B2 - D2 - diag(B2 x2) ].
Matrix jacobian(const BiVirusSystem& sys, const EpidemicState& point);

/// Stability of a verified equilibrium (residual <= 1e-8 required) from the
/// Jacobian spectrum; max real part within +-1e-7 of zero is marginal.
EquilibriumReport classify_stability(const BiVirusSystem& sys, const EpidemicState& point);

/// The healthy state plus every single-virus boundary equilibrium that the
/// regime admits, each with its Jacobian stability.
std::vector<EquilibriumReport> boundary_equilibria(const BiVirusSystem& sys);

/// Structural applicability of the coexistence construction: either the two
/// viruses are identical, or both are homogeneous on one shared graph with
/// matching healing/infection ratios.
struct CoexistenceStructure {
    bool applicable = false;
    bool identical = false;   // D1 == D2 and B1 == B2
    bool equal_ratio = false; // homogeneous same-graph viruses with delta/beta match
    std::string reason;       // why not applicable, when applicable == false
};

CoexistenceStructure coexistence_structure(const BiVirusSystem& sys);

/// The unique coexisting equilibrium with x1 = alpha * x2, built by splitting
/// the shared single-virus epidemic state z: x1 = alpha/(1+alpha) z,
/// x2 = 1/(1+alpha) z. Throws when the structure does not admit coexistence.
std::pair<Vector, Vector> coexistence_pair(const BiVirusSystem& sys, double alpha);

/// Heuristic, non-exhaustive search for interior equilibria by long-horizon
/// integration from random interior starts; deduplicated limit points with
/// both viruses persisting are classified and returned.
std::vector<EquilibriumReport> search_interior_equilibria(const BiVirusSystem& sys, int num_starts,
                                                          std::uint64_t seed, const IntegratorConfig& cfg);

inline constexpr double kEquilibriumResidualTol = 1e-10;
inline constexpr double kJacobianMarginalBand = 1e-7;

} // namespace bivirus

#endif
