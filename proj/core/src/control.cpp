#include "bivirus/control.hpp"

#include <cmath>
#include <limits>

#include "bivirus/equilibria.hpp"
#include "bivirus/graph.hpp"
#include "bivirus/spectral.hpp"

namespace bivirus {

void ControlGains::validate() const {
    if (k1.size() == 0 || k1.size() != k2.size()) throw ValidationError("ControlGains: dimension mismatch");
    if ((k1.array() <= 0.0).any() || (k2.array() <= 0.0).any())
        throw ValidationError("ControlGains: gains must be strictly positive");
}

Vector constant_rate_stabilizer(const Matrix& beta) {
    if (beta.rows() != beta.cols() || beta.rows() == 0)
        throw ValidationError("constant_rate_stabilizer: matrix must be square");
    if ((beta.array() < 0.0).any()) throw ValidationError("constant_rate_stabilizer: negative entries");
    if (!is_irreducible(beta)) throw ValidationError("constant_rate_stabilizer: matrix is reducible");
    Vector delta = beta.rowwise().sum();
    if ((delta.array() <= 0.0).any())
        throw ValidationError("constant_rate_stabilizer: zero row sum, D^{-1} undefined");
    Matrix m = beta;
    m.diagonal() -= delta;
    const double s = spectral_abscissa_metzler(m);
    if (std::abs(s) > kCriticalBand)
        throw NumericError("constant_rate_stabilizer: closed loop off threshold, s = " + std::to_string(s));
    return delta;
}

Vector controlled_equilibrium_single(const Vector& gains, const Matrix& beta) {
    if (gains.size() != beta.rows() || beta.rows() != beta.cols())
        throw ValidationError("controlled_equilibrium_single: dimension mismatch");
    if ((gains.array() <= 0.0).any())
        throw ValidationError("controlled_equilibrium_single: gains must be positive");
    if (!is_irreducible(beta)) throw ValidationError("controlled_equilibrium_single: reducible matrix");
    // -Kx.x + (1-x).Bx == -(K)x + (1-x).((K+B)x): the loop is an SIS system
    // with healing K and infection K + B, which is always supercritical.
    Matrix shifted = beta;
    shifted.diagonal() += gains;
    return single_virus_equilibrium(gains, shifted);
}

namespace {

double repeller_floor(double x0_inf) { return std::max(1e-3, x0_inf / 10.0); }

// Minimum of `norm(sample)` over the late window [t_max/2, t_end].
template <typename NormFn>
double late_window_min(const Trajectory& traj, NormFn&& norm) {
    const double t_half = traj.times.back() / 2.0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < traj.times.size(); ++i)
        if (traj.times[i] >= t_half) best = std::min(best, norm(traj.states[i]));
    return best;
}

} // namespace

ImpossibilityReport impossibility_demo_single(const Vector& gains, const Matrix& beta, const Vector& x0,
                                              const IntegratorConfig& cfg) {
    if ((x0.array() < 0.0).any() || x0.maxCoeff() <= 0.0)
        throw ValidationError("impossibility_demo_single: x0 must be nonnegative and nonzero");
    ImpossibilityReport rep;
    rep.equilibrium = controlled_equilibrium_single(gains, beta);
    rep.trajectory = integrate_controlled_single(gains, beta, x0, cfg);
    rep.floor = repeller_floor(x0.lpNorm<Eigen::Infinity>());
    rep.late_window_min =
        late_window_min(rep.trajectory, [](const Vector& x) { return x.lpNorm<Eigen::Infinity>(); });
    rep.stays_above_floor = rep.late_window_min >= rep.floor;
    rep.final_gap = (rep.trajectory.states.back() - rep.equilibrium).lpNorm<Eigen::Infinity>();

    // || x ||_inf grows monotonically until the state is within 1e-6 of x*.
    rep.monotone_growth = true;
    double prev = -1.0;
    for (const Vector& x : rep.trajectory.states) {
        if ((x - rep.equilibrium).lpNorm<Eigen::Infinity>() <= 1e-6) break;
        const double norm = x.lpNorm<Eigen::Infinity>();
        if (norm < prev - 1e-12) {
            rep.monotone_growth = false;
            break;
        }
        prev = norm;
    }
    return rep;
}

ImpossibilityReport impossibility_demo(const ControlGains& gains, const Matrix& beta1, const Matrix& beta2,
                                       const EpidemicState& x0, const IntegratorConfig& cfg) {
    gains.validate();
    if (!in_domain(x0) || stack(x0).maxCoeff() <= 0.0)
        throw ValidationError("impossibility_demo: x0 must lie in the domain with some infection");
    ImpossibilityReport rep;
    rep.trajectory = integrate_controlled_bivirus(gains.k1, gains.k2, beta1, beta2, x0, cfg);
    rep.floor = repeller_floor(stack(x0).lpNorm<Eigen::Infinity>());
    const auto n = x0.x1.size();
    rep.late_window_min = late_window_min(rep.trajectory, [n](const Vector& s) {
        return (s.head(n) + s.tail(n)).lpNorm<Eigen::Infinity>();
    });
    rep.stays_above_floor = rep.late_window_min >= rep.floor;
    return rep;
}

} // namespace bivirus
