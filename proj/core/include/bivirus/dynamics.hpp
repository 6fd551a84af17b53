#ifndef BIVIRUS_DYNAMICS_HPP
#define BIVIRUS_DYNAMICS_HPP

#include <functional>
#include <utility>
#include <vector>

#include "bivirus/types.hpp"

namespace bivirus {

/// Healing-rate diagonals and infection matrices of the two competing viruses.
struct BiVirusSystem {
    Vector delta1, delta2;
    Matrix beta1, beta2;

    int n() const { return static_cast<int>(delta1.size()); }

    /// Checks nonnegative rates, matching dimensions, irreducible B matrices.
    void validate() const;
};

/// Per-node infected fractions (x1, x2). The dynamics live on the simplex
/// domain x1 >= 0, x2 >= 0, x1 + x2 <= 1 entrywise.
struct EpidemicState {
    Vector x1, x2;
};

bool in_domain(const EpidemicState& state, double tol = 0.0);

Vector stack(const EpidemicState& state);
EpidemicState unstack(const Vector& stacked);

/// dx1_i = -d1_i x1_i + (1 - x1_i - x2_i) sum_j b1_ij x1_j, and symmetrically.
std::pair<Vector, Vector> rhs_bivirus(const BiVirusSystem& sys, const EpidemicState& state);

/// dx_i = -delta_i x_i + (1 - x_i) sum_j beta_ij x_j.
Vector rhs_single(const Vector& delta, const Matrix& beta, const Vector& x);

/// Proportional-feedback closed loop: dx_i = -k_i x_i^2 + (1 - x_i) sum_j beta_ij x_j.
Vector rhs_controlled_single(const Vector& gains, const Matrix& beta, const Vector& x);

/// Bi-virus closed loop under per-virus proportional healing feedback.
std::pair<Vector, Vector> rhs_controlled_bivirus(const Vector& gains1, const Vector& gains2,
                                                 const Matrix& beta1, const Matrix& beta2,
                                                 const EpidemicState& state);

struct IntegratorConfig {
    double dt = 0.01;
    double t_max = 10000.0;
    double convergence_tol = 1e-10; // on ||rhs||_inf
    double clamp_tol = 1e-9;        // max domain violation projected away
    int record_stride = 0;          // steps between stored samples; 0 = auto (~1000 samples)
};

enum class Termination { converged, horizon, diverged };
std::string to_string(Termination t);

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states; // stacked state at each sample
    Termination termination = Termination::horizon;
    double final_residual = 0.0;
};

enum class StateDomain { unit_box, bivirus_simplex };

/// Classic fixed-step 4th-order integration. After each step, domain
/// violations up to clamp_tol are projected back; larger ones abort with
/// Termination::diverged. Converged when ||rhs||_inf < convergence_tol.
Trajectory integrate(const std::function<Vector(const Vector&)>& rhs, const Vector& x0,
                     StateDomain domain, const IntegratorConfig& cfg);

Trajectory integrate_bivirus(const BiVirusSystem& sys, const EpidemicState& x0, const IntegratorConfig& cfg);
Trajectory integrate_single(const Vector& delta, const Matrix& beta, const Vector& x0, const IntegratorConfig& cfg);
Trajectory integrate_controlled_single(const Vector& gains, const Matrix& beta, const Vector& x0,
                                       const IntegratorConfig& cfg);
Trajectory integrate_controlled_bivirus(const Vector& gains1, const Vector& gains2, const Matrix& beta1,
                                        const Matrix& beta2, const EpidemicState& x0, const IntegratorConfig& cfg);

/// Weighted max-norm distance max_k |x_k - x*_k| / x*_k, the decay diagnostic
/// for trajectories attracted to a strictly positive equilibrium.
double lyapunov_distance(const Vector& x, const Vector& x_star);

} // namespace bivirus

#endif
