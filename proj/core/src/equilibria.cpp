#include "bivirus/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bivirus/graph.hpp"
#include "bivirus/spectral.hpp"

namespace bivirus {

FixedPointConfig make_fixed_point_config(const Vector& delta, const Matrix& beta) {
    if (delta.size() != beta.rows() || beta.rows() != beta.cols())
        throw ValidationError("make_fixed_point_config: dimension mismatch");
    if ((delta.array() < 0.0).any()) throw ValidationError("make_fixed_point_config: negative healing rate");
    Matrix m = beta;
    m.diagonal() -= delta;
    const double s = spectral_abscissa_metzler(m);
    if (s <= 0.0) throw NumericError("no epidemic state: s(-D+B) <= 0");

    FixedPointConfig cfg;
    cfg.shift = 0.5 * s;
    Vector dbar = delta.array() + cfg.shift;
    Matrix scaled = dbar.cwiseInverse().asDiagonal() * beta;
    auto [r, v] = spectral_radius_nonneg(scaled);
    cfg.rho_shifted = r;
    cfg.perron = v; // unit max entry
    // Admissible start bound: epsilon * v_i <= (r-1)/r. Half of the largest
    // admissible epsilon keeps the start strictly inside the invariant set.
    cfg.epsilon = 0.5 * (r - 1.0) / r;
    return cfg;
}

namespace {

// x <- f(x) for the monotone map f_i(x) = u_i / (a_i + u_i), u = (D+cI)^{-1} B x,
// a_i = delta_i / (c + delta_i). Single shared B x evaluation per sweep.
struct FixedPointMap {
    const Vector& delta;
    const Matrix& beta;
    Vector a;      // a_i
    Vector dbar_inv;

    FixedPointMap(const Vector& d, const Matrix& b, double shift) : delta(d), beta(b) {
        dbar_inv = (d.array() + shift).inverse();
        a = d.array() * dbar_inv.array(); // delta_i / (c + delta_i)
    }

    // Returns f(x); also reports the dynamics residual at x through `residual`.
    Vector apply(const Vector& x, double& residual) const {
        const Vector bx = beta * x;
        residual = (-delta.cwiseProduct(x) + (Vector::Ones(x.size()) - x).cwiseProduct(bx))
                       .lpNorm<Eigen::Infinity>();
        const Vector u = dbar_inv.cwiseProduct(bx);
        return u.array() / (a.array() + u.array());
    }
};

} // namespace

Vector single_virus_equilibrium(const Vector& delta, const Matrix& beta, const FixedPointConfig& cfg,
                                const Vector* start) {
    if (!(cfg.shift > 0.0) || !(cfg.epsilon > 0.0) || cfg.perron.size() != delta.size())
        throw ValidationError("single_virus_equilibrium: invalid fixed-point config");
    FixedPointMap map(delta, beta, cfg.shift);

    Vector x = start ? *start : Vector(cfg.epsilon * cfg.perron);
    if ((x.array() <= 0.0).any() || (x.array() > 1.0).any())
        throw ValidationError("single_virus_equilibrium: start must lie in (0, 1]^n");

    double residual = 0.0;
    Vector prev_step;
    for (long it = 0; it < cfg.max_iters; ++it) {
        Vector fx = map.apply(x, residual);
        if (residual <= cfg.tol) return x;
        Vector step = fx - x;
        // Damping guard: a monotone start never oscillates, an arbitrary one may.
        if (prev_step.size() != 0 && step.dot(prev_step) < 0.0) fx = 0.5 * (x + fx);
        prev_step = fx - x;
        x = std::move(fx);
    }
    if (residual <= kEquilibriumResidualTol) return x;
    throw NumericError("single_virus_equilibrium: no convergence within " + std::to_string(cfg.max_iters) +
                       " iterations (residual " + std::to_string(residual) + ")");
}

Vector single_virus_equilibrium(const Vector& delta, const Matrix& beta) {
    return single_virus_equilibrium(delta, beta, make_fixed_point_config(delta, beta));
}

std::string to_string(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::HealthyGlobal: return "HealthyGlobal";
        case RegimeLabel::Virus1Dominant: return "Virus1Dominant";
        case RegimeLabel::Virus2Dominant: return "Virus2Dominant";
        case RegimeLabel::BothSupercritical: return "BothSupercritical";
        case RegimeLabel::Critical: return "Critical";
    }
    return "?";
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::marginal: return "marginal";
    }
    return "?";
}

RegimeLabel classify_regime_from_abscissas(double s1, double s2) {
    if (std::abs(s1) < kCriticalBand || std::abs(s2) < kCriticalBand) return RegimeLabel::Critical;
    if (s1 < 0.0 && s2 < 0.0) return RegimeLabel::HealthyGlobal;
    if (s1 > 0.0 && s2 < 0.0) return RegimeLabel::Virus1Dominant;
    if (s1 < 0.0 && s2 > 0.0) return RegimeLabel::Virus2Dominant;
    return RegimeLabel::BothSupercritical;
}

RegimeLabel classify_regime(const BiVirusSystem& sys) {
    sys.validate();
    Matrix m1 = sys.beta1;
    m1.diagonal() -= sys.delta1;
    Matrix m2 = sys.beta2;
    m2.diagonal() -= sys.delta2;
    return classify_regime_from_abscissas(spectral_abscissa_metzler(m1), spectral_abscissa_metzler(m2));
}

Matrix jacobian(const BiVirusSystem& sys, const EpidemicState& point) {
    const auto n = sys.delta1.size();
    if (point.x1.size() != n || point.x2.size() != n) throw ValidationError("jacobian: dimension mismatch");
    const Vector susceptible = Vector::Ones(n) - point.x1 - point.x2;
    const Vector b1x = sys.beta1 * point.x1;
    const Vector b2x = sys.beta2 * point.x2;
    Matrix j(2 * n, 2 * n);
    Matrix j11 = susceptible.asDiagonal() * sys.beta1;
    j11.diagonal() -= sys.delta1 + b1x;
    Matrix j22 = susceptible.asDiagonal() * sys.beta2;
    j22.diagonal() -= sys.delta2 + b2x;
    j.topLeftCorner(n, n) = j11;
    j.topRightCorner(n, n) = Matrix((-b1x).asDiagonal());
    j.bottomLeftCorner(n, n) = Matrix((-b2x).asDiagonal());
    j.bottomRightCorner(n, n) = j22;
    return j;
}

namespace {

double bivirus_residual(const BiVirusSystem& sys, const EpidemicState& point) {
    auto [d1, d2] = rhs_bivirus(sys, point);
    return std::max(d1.lpNorm<Eigen::Infinity>(), d2.lpNorm<Eigen::Infinity>());
}

EquilibriumReport make_report(const BiVirusSystem& sys, const EpidemicState& point, std::string label,
                              RegimeLabel regime) {
    EquilibriumReport rep;
    rep.label = std::move(label);
    rep.point = point;
    rep.residual = bivirus_residual(sys, point);
    const SpectrumResult spec = eigen_all(jacobian(sys, point));
    rep.spectrum = spec.eigenvalues;
    rep.max_real_part = spec.max_real_part;
    if (spec.max_real_part < -kJacobianMarginalBand)
        rep.stability = Stability::stable;
    else if (spec.max_real_part > kJacobianMarginalBand)
        rep.stability = Stability::unstable;
    else
        rep.stability = Stability::marginal;
    rep.regime = regime;
    return rep;
}

} // namespace

EquilibriumReport classify_stability(const BiVirusSystem& sys, const EpidemicState& point) {
    if (bivirus_residual(sys, point) > 1e-8)
        throw ValidationError("classify_stability: point is not an equilibrium (residual > 1e-8)");
    return make_report(sys, point, "point", classify_regime(sys));
}

std::vector<EquilibriumReport> boundary_equilibria(const BiVirusSystem& sys) {
    sys.validate();
    const auto n = sys.delta1.size();
    const RegimeLabel regime = classify_regime(sys);
    Matrix m1 = sys.beta1;
    m1.diagonal() -= sys.delta1;
    Matrix m2 = sys.beta2;
    m2.diagonal() -= sys.delta2;
    const double s1 = spectral_abscissa_metzler(m1);
    const double s2 = spectral_abscissa_metzler(m2);

    std::vector<EquilibriumReport> out;
    const Vector zero = Vector::Zero(n);
    out.push_back(make_report(sys, EpidemicState{zero, zero}, "healthy", regime));
    if (s1 > 0.0) {
        Vector x1 = single_virus_equilibrium(sys.delta1, sys.beta1);
        out.push_back(make_report(sys, EpidemicState{std::move(x1), zero}, "virus1-dominant", regime));
    }
    if (s2 > 0.0) {
        Vector x2 = single_virus_equilibrium(sys.delta2, sys.beta2);
        out.push_back(make_report(sys, EpidemicState{zero, std::move(x2)}, "virus2-dominant", regime));
    }
    return out;
}

namespace {

constexpr double kStructureTol = 1e-12;

// True when all entries picked out by the mask are equal to within tol,
// writing the common value to `value`.
bool homogeneous_value(const Matrix& m, double& value) {
    value = 0.0;
    bool seen = false;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double e = m(i, j);
            if (e == 0.0) continue;
            if (!seen) {
                value = e;
                seen = true;
            } else if (std::abs(e - value) > kStructureTol * std::max(1.0, std::abs(value))) {
                return false;
            }
        }
    return seen;
}

bool same_pattern(const Matrix& a, const Matrix& b) {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if ((a(i, j) != 0.0) != (b(i, j) != 0.0)) return false;
    return true;
}

} // namespace

CoexistenceStructure coexistence_structure(const BiVirusSystem& sys) {
    CoexistenceStructure s;
    const bool same_d = (sys.delta1 - sys.delta2).lpNorm<Eigen::Infinity>() <= kStructureTol;
    const bool same_b = (sys.beta1 - sys.beta2).lpNorm<Eigen::Infinity>() <= kStructureTol;
    if (same_d && same_b && (sys.delta1.array() > 0.0).all()) {
        s.applicable = true;
        s.identical = true;
        return s;
    }
    // Homogeneous viruses on one shared graph with equal delta/beta ratios.
    double d1, d2, b1, b2;
    const bool homo_d1 = (sys.delta1.array() - sys.delta1(0)).abs().maxCoeff() <= kStructureTol;
    const bool homo_d2 = (sys.delta2.array() - sys.delta2(0)).abs().maxCoeff() <= kStructureTol;
    d1 = sys.delta1(0);
    d2 = sys.delta2(0);
    if (!homo_d1 || !homo_d2 || d1 <= 0.0 || d2 <= 0.0) {
        s.reason = "viruses are neither identical nor homogeneous with positive healing rates";
        return s;
    }
    if (!same_pattern(sys.beta1, sys.beta2)) {
        s.reason = "the two infection graphs differ";
        return s;
    }
    if (!homogeneous_value(sys.beta1, b1) || !homogeneous_value(sys.beta2, b2)) {
        s.reason = "infection rates are not homogeneous over the shared graph";
        return s;
    }
    const double r1 = d1 / b1;
    const double r2 = d2 / b2;
    if (std::abs(r1 - r2) > kStructureTol * std::max(1.0, std::abs(r1))) {
        s.reason = "no coexisting equilibria: delta/beta ratios differ (" + std::to_string(r1) + " vs " +
                   std::to_string(r2) + ")";
        return s;
    }
    s.applicable = true;
    s.equal_ratio = true;
    return s;
}

std::pair<Vector, Vector> coexistence_pair(const BiVirusSystem& sys, double alpha) {
    sys.validate();
    if (!(alpha > 0.0)) throw ValidationError("coexistence_pair: alpha must be positive");
    const CoexistenceStructure st = coexistence_structure(sys);
    if (!st.applicable) throw NumericError("coexistence_pair: " + st.reason);

    Matrix m1 = sys.beta1;
    m1.diagonal() -= sys.delta1;
    if (spectral_abscissa_metzler(m1) <= 0.0)
        throw NumericError("coexistence_pair: no epidemic state, s(-D+B) <= 0");

    // The total infection x1 + x2 follows the shared single-virus dynamics;
    // its epidemic state z splits as x1 = alpha/(1+alpha) z, x2 = z/(1+alpha).
    const Vector z = single_virus_equilibrium(sys.delta1, sys.beta1);
    Vector x1 = (alpha / (1.0 + alpha)) * z;
    Vector x2 = (1.0 / (1.0 + alpha)) * z;
    const double res = bivirus_residual(sys, EpidemicState{x1, x2});
    if (res > kEquilibriumResidualTol)
        throw NumericError("coexistence_pair: residual " + std::to_string(res) + " above tolerance");
    return {std::move(x1), std::move(x2)};
}

std::vector<EquilibriumReport> search_interior_equilibria(const BiVirusSystem& sys, int num_starts,
                                                          std::uint64_t seed, const IntegratorConfig& cfg) {
    sys.validate();
    const auto n = sys.delta1.size();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    std::vector<EquilibriumReport> found;
    const RegimeLabel regime = classify_regime(sys);
    for (int k = 0; k < num_starts; ++k) {
        EpidemicState x0{Vector(n), Vector(n)};
        for (Eigen::Index i = 0; i < n; ++i) {
            const double total = unit(rng);
            const double split = unit(rng);
            x0.x1(i) = total * split;
            x0.x2(i) = total * (1.0 - split);
        }
        const Trajectory traj = integrate_bivirus(sys, x0, cfg);
        if (traj.termination == Termination::diverged) continue;
        EpidemicState fin = unstack(traj.states.back());
        if (fin.x1.minCoeff() < 1e-6 || fin.x2.minCoeff() < 1e-6) continue; // boundary limit
        if (bivirus_residual(sys, fin) > 1e-8) continue;                    // still drifting
        const bool dup = std::any_of(found.begin(), found.end(), [&](const EquilibriumReport& r) {
            return (stack(r.point) - stack(fin)).lpNorm<Eigen::Infinity>() < 1e-6;
        });
        if (dup) continue;
        EquilibriumReport rep = make_report(sys, fin, "interior", regime);
        found.push_back(std::move(rep));
    }
    return found;
}

} // namespace bivirus
