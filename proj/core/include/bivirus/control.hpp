#ifndef BIVIRUS_CONTROL_HPP
#define BIVIRUS_CONTROL_HPP

#include "bivirus/dynamics.hpp"
#include "bivirus/types.hpp"

namespace bivirus {

/// Positive per-virus feedback gains for the proportional healing law
/// delta_i(t) = k_i x_i(t).
struct ControlGains {
    Vector k1, k2;
    void validate() const;
};

/// Constant healing rates delta_i = sum_j beta_ij that place the closed loop
/// exactly on the epidemic threshold, s(-D + B) = 0, so the healthy state is
/// asymptotically stable. Rejects zero rows.
Vector constant_rate_stabilizer(const Matrix& beta);

/// The unique strictly positive equilibrium of the proportional-feedback
/// single-virus loop, obtained from the substituted system (D, B) -> (K, K+B).
Vector controlled_equilibrium_single(const Vector& gains, const Matrix& beta);

struct ImpossibilityReport {
    Trajectory trajectory;
    double floor = 0.0;            // certified repeller floor
    double late_window_min = 0.0;  // min of ||x||_inf (single) or ||x1+x2||_inf (bi-virus)
    bool stays_above_floor = false;
    // single-virus extras
    Vector equilibrium;            // controlled equilibrium x*
    double final_gap = 0.0;        // ||x(end) - x*||_inf
    bool monotone_growth = true;   // ||x||_inf non-decreasing until within 1e-6 of x*
};

/// Shows the single-virus repeller behavior: from a positive start the
/// trajectory never returns toward the healthy state and converges to the
/// controlled equilibrium. The floor is max(1e-3, ||x0||_inf / 10) over the
/// late window [t_max/2, t_max].
ImpossibilityReport impossibility_demo_single(const Vector& gains, const Matrix& beta, const Vector& x0,
                                              const IntegratorConfig& cfg);

/// Bi-virus counterpart: total infection in the late window stays above the
/// floor, so the proportional controller cannot reach the healthy state.
ImpossibilityReport impossibility_demo(const ControlGains& gains, const Matrix& beta1, const Matrix& beta2,
                                       const EpidemicState& x0, const IntegratorConfig& cfg);

} // namespace bivirus

#endif
