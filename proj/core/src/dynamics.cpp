#include "bivirus/dynamics.hpp"

#include <cmath>

#include "bivirus/graph.hpp"

namespace bivirus {

void BiVirusSystem::validate() const {
    const auto nn = delta1.size();
    if (nn == 0) throw ValidationError("BiVirusSystem: empty system");
    if (delta2.size() != nn || beta1.rows() != nn || beta1.cols() != nn || beta2.rows() != nn ||
        beta2.cols() != nn)
        throw ValidationError("BiVirusSystem: dimension mismatch");
    if ((delta1.array() < 0.0).any() || (delta2.array() < 0.0).any())
        throw ValidationError("BiVirusSystem: negative healing rate");
    if ((beta1.array() < 0.0).any() || (beta2.array() < 0.0).any())
        throw ValidationError("BiVirusSystem: negative infection rate");
    if (!is_irreducible(beta1)) throw ValidationError("BiVirusSystem: B1 is reducible");
    if (!is_irreducible(beta2)) throw ValidationError("BiVirusSystem: B2 is reducible");
}

bool in_domain(const EpidemicState& state, double tol) {
    if (state.x1.size() != state.x2.size()) return false;
    return (state.x1.array() >= -tol).all() && (state.x2.array() >= -tol).all() &&
           ((state.x1 + state.x2).array() <= 1.0 + tol).all();
}

Vector stack(const EpidemicState& state) {
    Vector out(state.x1.size() + state.x2.size());
    out << state.x1, state.x2;
    return out;
}

EpidemicState unstack(const Vector& stacked) {
    const auto n = stacked.size() / 2;
    return EpidemicState{stacked.head(n), stacked.tail(n)};
}

std::pair<Vector, Vector> rhs_bivirus(const BiVirusSystem& sys, const EpidemicState& state) {
    const auto n = sys.delta1.size();
    if (state.x1.size() != n || state.x2.size() != n)
        throw ValidationError("rhs_bivirus: state dimension mismatch");
    const Vector susceptible = Vector::Ones(n) - state.x1 - state.x2;
    Vector d1 = -sys.delta1.cwiseProduct(state.x1) + susceptible.cwiseProduct(sys.beta1 * state.x1);
    Vector d2 = -sys.delta2.cwiseProduct(state.x2) + susceptible.cwiseProduct(sys.beta2 * state.x2);
    return {std::move(d1), std::move(d2)};
}

Vector rhs_single(const Vector& delta, const Matrix& beta, const Vector& x) {
    if (delta.size() != x.size() || beta.rows() != x.size() || beta.cols() != x.size())
        throw ValidationError("rhs_single: dimension mismatch");
    return -delta.cwiseProduct(x) + (Vector::Ones(x.size()) - x).cwiseProduct(beta * x);
}

Vector rhs_controlled_single(const Vector& gains, const Matrix& beta, const Vector& x) {
    if (gains.size() != x.size() || beta.rows() != x.size() || beta.cols() != x.size())
        throw ValidationError("rhs_controlled_single: dimension mismatch");
    if ((gains.array() <= 0.0).any()) throw ValidationError("rhs_controlled_single: gains must be positive");
    return -gains.cwiseProduct(x.cwiseProduct(x)) + (Vector::Ones(x.size()) - x).cwiseProduct(beta * x);
}

std::pair<Vector, Vector> rhs_controlled_bivirus(const Vector& gains1, const Vector& gains2,
                                                 const Matrix& beta1, const Matrix& beta2,
                                                 const EpidemicState& state) {
    const auto n = state.x1.size();
    if (gains1.size() != n || gains2.size() != n || beta1.rows() != n || beta2.rows() != n ||
        state.x2.size() != n)
        throw ValidationError("rhs_controlled_bivirus: dimension mismatch");
    if ((gains1.array() <= 0.0).any() || (gains2.array() <= 0.0).any())
        throw ValidationError("rhs_controlled_bivirus: gains must be positive");
    const Vector susceptible = Vector::Ones(n) - state.x1 - state.x2;
    Vector d1 = -gains1.cwiseProduct(state.x1.cwiseProduct(state.x1)) +
                susceptible.cwiseProduct(beta1 * state.x1);
    Vector d2 = -gains2.cwiseProduct(state.x2.cwiseProduct(state.x2)) +
                susceptible.cwiseProduct(beta2 * state.x2);
    return {std::move(d1), std::move(d2)};
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::converged: return "converged";
        case Termination::horizon: return "horizon";
        case Termination::diverged: return "diverged";
    }
    return "?";
}

namespace {

// Projects onto the state domain. Returns false when a violation exceeds tol.
bool project(Vector& x, StateDomain domain, double tol) {
    const auto len = x.size();
    if (domain == StateDomain::unit_box) {
        for (Eigen::Index i = 0; i < len; ++i) {
            if (x(i) < 0.0) {
                if (x(i) < -tol) return false;
                x(i) = 0.0;
            } else if (x(i) > 1.0) {
                if (x(i) > 1.0 + tol) return false;
                x(i) = 1.0;
            }
        }
        return true;
    }
    const auto n = len / 2;
    for (Eigen::Index i = 0; i < len; ++i) {
        if (x(i) < 0.0) {
            if (x(i) < -tol) return false;
            x(i) = 0.0;
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sum = x(i) + x(n + i);
        if (sum > 1.0) {
            if (sum > 1.0 + tol) return false;
            x(i) /= sum;
            x(n + i) /= sum;
        }
    }
    return true;
}

bool valid_initial(const Vector& x0, StateDomain domain) {
    if ((x0.array() < 0.0).any() || (x0.array() > 1.0).any()) return false;
    if (domain == StateDomain::bivirus_simplex) {
        const auto n = x0.size() / 2;
        if (((x0.head(n) + x0.tail(n)).array() > 1.0).any()) return false;
    }
    return true;
}

} // namespace

Trajectory integrate(const std::function<Vector(const Vector&)>& rhs, const Vector& x0,
                     StateDomain domain, const IntegratorConfig& cfg) {
    if (cfg.dt <= 0.0 || cfg.t_max <= 0.0 || cfg.convergence_tol <= 0.0 || cfg.clamp_tol <= 0.0)
        throw ValidationError("integrate: dt, t_max and tolerances must be positive");
    if (!valid_initial(x0, domain)) throw ValidationError("integrate: initial state outside the domain");

    const long total_steps = static_cast<long>(std::ceil(cfg.t_max / cfg.dt - 1e-12));
    int stride = cfg.record_stride;
    if (stride <= 0) stride = static_cast<int>(std::max(1L, total_steps / 1000));

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(x0);

    Vector x = x0;
    const double h = cfg.dt;
    Termination reason = Termination::horizon;
    long step = 0;
    for (; step < total_steps; ++step) {
        const Vector k1 = rhs(x);
        if (k1.lpNorm<Eigen::Infinity>() < cfg.convergence_tol) {
            reason = Termination::converged;
            break;
        }
        const Vector k2 = rhs(x + 0.5 * h * k1);
        const Vector k3 = rhs(x + 0.5 * h * k2);
        const Vector k4 = rhs(x + h * k3);
        Vector next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!project(next, domain, cfg.clamp_tol)) {
            reason = Termination::diverged;
            break;
        }
        x = std::move(next);
        if ((step + 1) % stride == 0) {
            traj.times.push_back((step + 1) * h);
            traj.states.push_back(x);
        }
    }
    // x holds the last in-domain state, reached after `step` completed steps.
    if (traj.times.back() != step * h) {
        traj.times.push_back(step * h);
        traj.states.push_back(x);
    }
    traj.termination = reason;
    traj.final_residual = rhs(x).lpNorm<Eigen::Infinity>();
    return traj;
}

Trajectory integrate_bivirus(const BiVirusSystem& sys, const EpidemicState& x0, const IntegratorConfig& cfg) {
    const auto n = sys.delta1.size();
    auto rhs = [&sys, n](const Vector& s) {
        EpidemicState st{s.head(n), s.tail(n)};
        auto [d1, d2] = rhs_bivirus(sys, st);
        Vector out(2 * n);
        out << d1, d2;
        return out;
    };
    return integrate(rhs, stack(x0), StateDomain::bivirus_simplex, cfg);
}

Trajectory integrate_single(const Vector& delta, const Matrix& beta, const Vector& x0,
                            const IntegratorConfig& cfg) {
    auto rhs = [&](const Vector& x) { return rhs_single(delta, beta, x); };
    return integrate(rhs, x0, StateDomain::unit_box, cfg);
}

Trajectory integrate_controlled_single(const Vector& gains, const Matrix& beta, const Vector& x0,
                                       const IntegratorConfig& cfg) {
    auto rhs = [&](const Vector& x) { return rhs_controlled_single(gains, beta, x); };
    return integrate(rhs, x0, StateDomain::unit_box, cfg);
}

Trajectory integrate_controlled_bivirus(const Vector& gains1, const Vector& gains2, const Matrix& beta1,
                                        const Matrix& beta2, const EpidemicState& x0,
                                        const IntegratorConfig& cfg) {
    const auto n = x0.x1.size();
    auto rhs = [&, n](const Vector& s) {
        EpidemicState st{s.head(n), s.tail(n)};
        auto [d1, d2] = rhs_controlled_bivirus(gains1, gains2, beta1, beta2, st);
        Vector out(2 * n);
        out << d1, d2;
        return out;
    };
    return integrate(rhs, stack(x0), StateDomain::bivirus_simplex, cfg);
}

double lyapunov_distance(const Vector& x, const Vector& x_star) {
    if (x.size() != x_star.size()) throw ValidationError("lyapunov_distance: dimension mismatch");
    if ((x_star.array() <= 0.0).any())
        throw ValidationError("lyapunov_distance: reference point must be strictly positive");
    return ((x - x_star).cwiseAbs().cwiseQuotient(x_star)).maxCoeff();
}

} // namespace bivirus
