#include "bivirus/markov.hpp"

#include <algorithm>
#include <cmath>

namespace bivirus {

namespace {

constexpr int kMaxChainNodes = 12;
constexpr double kNegativeProbabilityTol = 1e-12;
constexpr double kStationaryExitTol = 1e-12; // on ||dy/dt||_1

std::int64_t pow3(int n) {
    std::int64_t p = 1;
    for (int i = 0; i < n; ++i) p *= 3;
    return p;
}

} // namespace

std::int64_t state_index(const std::vector<int>& digits) {
    std::int64_t idx = 0, weight = 1;
    for (int d : digits) {
        if (d < 0 || d > 2) throw ValidationError("state_index: digits must be in {0,1,2}");
        idx += weight * d;
        weight *= 3;
    }
    return idx + 1;
}

std::vector<int> state_digits(std::int64_t index, int n) {
    if (index < 1 || index > pow3(n)) throw ValidationError("state_digits: index out of range");
    std::vector<int> digits(n);
    std::int64_t rem = index - 1;
    for (int i = 0; i < n; ++i) {
        digits[i] = static_cast<int>(rem % 3);
        rem /= 3;
    }
    return digits;
}

std::vector<Transition> GeneratorMatrix::transitions_from(std::int64_t index) const {
    if (index < 1 || index > num_states) throw ValidationError("transitions_from: index out of range");
    const std::int64_t k = index - 1;
    std::vector<Transition> out;
    for (std::int64_t p = out_ptr[k]; p < out_ptr[k + 1]; ++p)
        out.push_back({out_dst[p] + 1, out_rate[p]});
    return out;
}

double GeneratorMatrix::rate(std::int64_t from, std::int64_t to) const {
    if (from == to) return -exit_rate[from - 1];
    for (std::int64_t p = out_ptr[from - 1]; p < out_ptr[from]; ++p)
        if (out_dst[p] == to - 1) return out_rate[p];
    return 0.0;
}

GeneratorMatrix build_generator(const Vector& delta1, const Vector& delta2, const Matrix& beta1,
                                const Matrix& beta2) {
    const int n = static_cast<int>(delta1.size());
    if (n < 1 || delta2.size() != n || beta1.rows() != n || beta1.cols() != n || beta2.rows() != n ||
        beta2.cols() != n)
        throw ValidationError("build_generator: dimension mismatch");
    if (n > kMaxChainNodes)
        throw ValidationError("build_generator: n > " + std::to_string(kMaxChainNodes) +
                              " (3^n states would be unmanageable)");
    if ((delta1.array() < 0.0).any() || (delta2.array() < 0.0).any())
        throw ValidationError("build_generator: negative healing rate");
    if ((beta1.array() < 0.0).any() || (beta2.array() < 0.0).any())
        throw ValidationError("build_generator: negative infection rate");
    if (beta1.diagonal().cwiseAbs().maxCoeff() != 0.0 || beta2.diagonal().cwiseAbs().maxCoeff() != 0.0)
        throw ValidationError("build_generator: infection matrices must have zero diagonal");

    GeneratorMatrix q;
    q.n = n;
    q.num_states = pow3(n);
    q.out_ptr.assign(static_cast<size_t>(q.num_states) + 1, 0);
    q.exit_rate.assign(static_cast<size_t>(q.num_states), 0.0);

    std::vector<std::int64_t> weight(n);
    weight[0] = 1;
    for (int i = 1; i < n; ++i) weight[i] = weight[i - 1] * 3;

    // Two passes over the state space with an odometer on the digits:
    // count out-edges, then fill them.
    std::vector<int> digits(n, 0);
    std::vector<double> pressure1(n), pressure2(n);
    for (int pass = 0; pass < 2; ++pass) {
        std::fill(digits.begin(), digits.end(), 0);
        for (std::int64_t k = 0; k < q.num_states; ++k) {
            for (int i = 0; i < n; ++i) {
                pressure1[i] = 0.0;
                pressure2[i] = 0.0;
            }
            for (int j = 0; j < n; ++j) {
                if (digits[j] == 1) {
                    for (int i = 0; i < n; ++i) pressure1[i] += beta1(i, j);
                } else if (digits[j] == 2) {
                    for (int i = 0; i < n; ++i) pressure2[i] += beta2(i, j);
                }
            }
            std::int64_t slot = (pass == 1) ? q.out_ptr[k] : 0;
            std::int64_t count = 0;
            double exit = 0.0;
            auto emit = [&](std::int64_t dst, double rate) {
                if (pass == 1) {
                    q.out_dst[slot] = static_cast<std::int32_t>(dst);
                    q.out_rate[slot] = rate;
                    ++slot;
                }
                ++count;
                exit += rate;
            };
            for (int i = 0; i < n; ++i) {
                switch (digits[i]) {
                    case 1:
                        if (delta1(i) > 0.0) emit(k - weight[i], delta1(i));
                        break;
                    case 2:
                        if (delta2(i) > 0.0) emit(k - 2 * weight[i], delta2(i));
                        break;
                    default:
                        if (pressure1[i] > 0.0) emit(k + weight[i], pressure1[i]);
                        if (pressure2[i] > 0.0) emit(k + 2 * weight[i], pressure2[i]);
                        break;
                }
            }
            if (pass == 0) {
                q.out_ptr[k + 1] = count;
            } else {
                q.exit_rate[k] = exit;
            }
            // odometer increment
            for (int i = 0; i < n; ++i) {
                if (++digits[i] <= 2) break;
                digits[i] = 0;
            }
        }
        if (pass == 0) {
            for (std::int64_t k = 0; k < q.num_states; ++k) q.out_ptr[k + 1] += q.out_ptr[k];
            q.out_dst.assign(static_cast<size_t>(q.out_ptr[q.num_states]), 0);
            q.out_rate.assign(static_cast<size_t>(q.out_ptr[q.num_states]), 0.0);
        }
    }
    q.max_exit_rate = 0.0;
    for (double e : q.exit_rate) q.max_exit_rate = std::max(q.max_exit_rate, e);

    // Transposed CSR for the gather-form dy = Q^T y.
    const std::int64_t nnz = q.out_ptr[q.num_states];
    q.in_ptr.assign(static_cast<size_t>(q.num_states) + 1, 0);
    for (std::int64_t p = 0; p < nnz; ++p) ++q.in_ptr[q.out_dst[p] + 1];
    for (std::int64_t k = 0; k < q.num_states; ++k) q.in_ptr[k + 1] += q.in_ptr[k];
    q.in_src.assign(static_cast<size_t>(nnz), 0);
    q.in_rate.assign(static_cast<size_t>(nnz), 0.0);
    std::vector<std::int64_t> cursor(q.in_ptr.begin(), q.in_ptr.end() - 1);
    for (std::int64_t k = 0; k < q.num_states; ++k) {
        for (std::int64_t p = q.out_ptr[k]; p < q.out_ptr[k + 1]; ++p) {
            const std::int64_t c = cursor[q.out_dst[p]]++;
            q.in_src[c] = static_cast<std::int32_t>(k);
            q.in_rate[c] = q.out_rate[p];
        }
    }
    return q;
}

Vector initial_distribution(const Vector& x1, const Vector& x2) {
    const int n = static_cast<int>(x1.size());
    if (x2.size() != n) throw ValidationError("initial_distribution: dimension mismatch");
    for (int i = 0; i < n; ++i) {
        if (x1(i) < 0.0 || x2(i) < 0.0 || x1(i) + x2(i) > 1.0)
            throw ValidationError("initial_distribution: node marginals outside the simplex");
    }
    const std::int64_t num_states = pow3(n);
    Vector y(num_states);
    std::vector<int> digits(n, 0);
    for (std::int64_t k = 0; k < num_states; ++k) {
        double p = 1.0;
        for (int i = 0; i < n; ++i) {
            const double pi =
                digits[i] == 0 ? (1.0 - x1(i) - x2(i)) : (digits[i] == 1 ? x1(i) : x2(i));
            p *= pi;
            if (p == 0.0) break;
        }
        y(k) = p;
        for (int i = 0; i < n; ++i) {
            if (++digits[i] <= 2) break;
            digits[i] = 0;
        }
    }
    return y;
}

namespace {

// dy = Q^T y for LANES interleaved distributions.
template <int LANES>
void apply_generator(const GeneratorMatrix& q, const double* __restrict y, double* __restrict dy) {
    const std::int64_t m = q.num_states;
    const std::int64_t* __restrict ptr = q.in_ptr.data();
    const std::int32_t* __restrict src = q.in_src.data();
    const double* __restrict rate = q.in_rate.data();
    const double* __restrict exit = q.exit_rate.data();
    for (std::int64_t l = 0; l < m; ++l) {
        double acc[LANES];
        const double ex = -exit[l];
        for (int c = 0; c < LANES; ++c) acc[c] = ex * y[l * LANES + c];
        for (std::int64_t p = ptr[l]; p < ptr[l + 1]; ++p) {
            const double r = rate[p];
            const double* ys = y + static_cast<std::int64_t>(src[p]) * LANES;
            for (int c = 0; c < LANES; ++c) acc[c] += r * ys[c];
        }
        for (int c = 0; c < LANES; ++c) dy[l * LANES + c] = acc[c];
    }
}

template <int LANES>
struct ChainWork {
    std::vector<double> y, k, acc, tmp;
    explicit ChainWork(std::int64_t m)
        : y(m * LANES, 0.0), k(m * LANES, 0.0), acc(m * LANES, 0.0), tmp(m * LANES, 0.0) {}
};

template <int LANES>
std::vector<Vector> run_chain(const GeneratorMatrix& q, const std::vector<Vector>& y0s, double t_max,
                              double dt_request, ChainRunStats* stats) {
    const std::int64_t m = q.num_states;
    const int cols = static_cast<int>(y0s.size());
    for (const Vector& y0 : y0s) {
        if (y0.size() != m) throw ValidationError("integrate_chain: distribution length != 3^n");
        if ((y0.array() < -kNegativeProbabilityTol).any() || std::abs(y0.sum() - 1.0) > 1e-9)
            throw ValidationError("integrate_chain: initial distribution is not on the simplex");
    }
    if (!(t_max > 0.0) || !(dt_request > 0.0))
        throw ValidationError("integrate_chain: t_max and dt must be positive");

    double dt = dt_request;
    if (q.max_exit_rate > 0.0) dt = std::min(dt, 0.1 / q.max_exit_rate);
    const long steps = static_cast<long>(std::ceil(t_max / dt - 1e-12));
    dt = t_max / static_cast<double>(steps);

    ChainWork<LANES> w(m);
    for (int c = 0; c < cols; ++c)
        for (std::int64_t i = 0; i < m; ++i) w.y[i * LANES + c] = y0s[c](i);

    ChainRunStats st;
    st.dt = dt;
    bool done[LANES] = {};
    for (int c = cols; c < LANES; ++c) done[c] = true;
    double prev_healthy[LANES];
    for (int c = 0; c < LANES; ++c) prev_healthy[c] = w.y[c];

    const double h = dt;
    long step = 0;
    for (; step < steps; ++step) {
        apply_generator<LANES>(q, w.y.data(), w.k.data()); // k1
        // Early-exit bookkeeping on k1 = dy/dt at the current point. The
        // semigroup contracts zero-sum vectors in the 1-norm, so once
        // ||dy/dt||_1 <= tol the remaining change is below t_max * tol.
        {
            double l1[LANES] = {};
            for (std::int64_t i = 0; i < m; ++i)
                for (int c = 0; c < LANES; ++c) l1[c] += std::abs(w.k[i * LANES + c]);
            bool all_done = true;
            for (int c = 0; c < cols; ++c) {
                if (!done[c] && (l1[c] <= kStationaryExitTol || w.y[c] >= 1.0 - 1e-12)) done[c] = true;
                if (!done[c]) all_done = false;
            }
            if (all_done) {
                st.early_exit = step > 0;
                break;
            }
        }
        const std::int64_t len = m * LANES;
        for (std::int64_t i = 0; i < len; ++i) {
            w.acc[i] = w.k[i];
            w.tmp[i] = w.y[i] + 0.5 * h * w.k[i];
        }
        apply_generator<LANES>(q, w.tmp.data(), w.k.data()); // k2
        for (std::int64_t i = 0; i < len; ++i) {
            w.acc[i] += 2.0 * w.k[i];
            w.tmp[i] = w.y[i] + 0.5 * h * w.k[i];
        }
        apply_generator<LANES>(q, w.tmp.data(), w.k.data()); // k3
        for (std::int64_t i = 0; i < len; ++i) {
            w.acc[i] += 2.0 * w.k[i];
            w.tmp[i] = w.y[i] + h * w.k[i];
        }
        apply_generator<LANES>(q, w.tmp.data(), w.k.data()); // k4
        double sums[LANES] = {};
        double mins[LANES];
        for (int c = 0; c < LANES; ++c) mins[c] = 0.0;
        for (std::int64_t i = 0; i < len; ++i) {
            w.y[i] += (h / 6.0) * (w.acc[i] + w.k[i]);
            const int c = static_cast<int>(i % LANES);
            sums[c] += w.y[i];
            mins[c] = std::min(mins[c], w.y[i]);
        }
        for (int c = 0; c < cols; ++c) {
            if (mins[c] < -kNegativeProbabilityTol)
                throw NumericError("integrate_chain: negative probability " + std::to_string(mins[c]) +
                                   " at t = " + std::to_string((step + 1) * h));
            st.max_drift = std::max(st.max_drift, std::abs(sums[c] - 1.0));
        }
        for (int c = cols; c < LANES; ++c) sums[c] = 1.0; // unused padding lanes
        for (std::int64_t i = 0; i < len; ++i) w.y[i] /= sums[i % LANES];
        for (int c = 0; c < cols; ++c) {
            if (w.y[c] < prev_healthy[c] - 1e-12) st.healthy_monotone = false;
            prev_healthy[c] = w.y[c];
        }
    }
    st.steps = step;
    st.exit_time = step * h;
    if (stats) *stats = st;

    std::vector<Vector> out(cols, Vector(m));
    for (int c = 0; c < cols; ++c)
        for (std::int64_t i = 0; i < m; ++i) out[c](i) = w.y[i * LANES + c];
    return out;
}

} // namespace

Vector integrate_chain(const GeneratorMatrix& q, const Vector& y0, double t_max, double dt,
                       ChainRunStats* stats) {
    return run_chain<1>(q, {y0}, t_max, dt, stats).front();
}

std::vector<Vector> integrate_chain_multi(const GeneratorMatrix& q, const std::vector<Vector>& y0s,
                                          double t_max, double dt, ChainRunStats* stats) {
    if (y0s.empty() || y0s.size() > 4)
        throw ValidationError("integrate_chain_multi: between 1 and 4 distributions");
    if (y0s.size() == 1) return {integrate_chain(q, y0s.front(), t_max, dt, stats)};
    return run_chain<4>(q, y0s, t_max, dt, stats);
}

std::pair<Vector, Vector> marginals(const Vector& y, int n) {
    const std::int64_t num_states = pow3(n);
    if (y.size() != num_states) throw ValidationError("marginals: distribution length != 3^n");
    Vector v1 = Vector::Zero(n), v2 = Vector::Zero(n);
    std::vector<int> digits(n, 0);
    for (std::int64_t k = 0; k < num_states; ++k) {
        const double yk = y(k);
        if (yk != 0.0) {
            for (int i = 0; i < n; ++i) {
                if (digits[i] == 1)
                    v1(i) += yk;
                else if (digits[i] == 2)
                    v2(i) += yk;
            }
        }
        for (int i = 0; i < n; ++i) {
            if (++digits[i] <= 2) break;
            digits[i] = 0;
        }
    }
    return {std::move(v1), std::move(v2)};
}

double meanfield_error(const BiVirusSystem& sys, const EpidemicState& x0, double t_final, double dt) {
    if (t_final < 0.0) throw ValidationError("meanfield_error: negative horizon");
    const GeneratorMatrix q = build_generator(sys.delta1, sys.delta2, sys.beta1, sys.beta2);
    const Vector y0 = initial_distribution(x0.x1, x0.x2);
    if (t_final == 0.0) {
        auto [v1, v2] = marginals(y0, sys.n());
        return std::sqrt((v1 - x0.x1).squaredNorm() + (v2 - x0.x2).squaredNorm());
    }
    const Vector yT = integrate_chain(q, y0, t_final, dt);
    auto [v1, v2] = marginals(yT, sys.n());

    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.t_max = t_final;
    cfg.convergence_tol = 1e-13; // residual this small moves x by < 1e-9 over the horizon
    const Trajectory traj = integrate_bivirus(sys, x0, cfg);
    const EpidemicState xT = unstack(traj.states.back());

    return std::sqrt((v1 - xT.x1).squaredNorm() + (v2 - xT.x2).squaredNorm());
}

} // namespace bivirus
