#ifndef BIVIRUS_MARKOV_HPP
#define BIVIRUS_MARKOV_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "bivirus/dynamics.hpp"
#include "bivirus/types.hpp"

namespace bivirus {

// The exact 3^n-state chain. Node i's local state is a ternary digit:
// 0 susceptible, 1 infected with virus 1, 2 infected with virus 2. A state's
// index is 1 + sum_i s_i 3^(i-1) (1-based); vectors over states use the
// 0-based offset index - 1, so the healthy state sits at offset 0.

/// 1-based index of the state with the given digits.
std::int64_t state_index(const std::vector<int>& digits);

/// Digits of the 1-based state index.
std::vector<int> state_digits(std::int64_t index, int n);

struct Transition {
    std::int64_t to;  // 1-based destination index
    double rate;
};

/// Sparse continuous-time generator. Off-diagonal rates are kept as per-state
/// out-edge lists; the diagonal is the negated exit rate, so each state's
/// rate-out row sums to zero by construction. A transposed CSR copy backs the
/// distribution integrator.
struct GeneratorMatrix {
    int n = 0;
    std::int64_t num_states = 0;

    std::vector<std::int64_t> out_ptr; // out-edge CSR over 0-based states
    std::vector<std::int32_t> out_dst;
    std::vector<double> out_rate;
    std::vector<double> exit_rate;     // -Q_kk per state
    double max_exit_rate = 0.0;

    std::vector<std::int64_t> in_ptr;  // CSR of the transpose, for dy = Q^T y
    std::vector<std::int32_t> in_src;
    std::vector<double> in_rate;

    std::vector<Transition> transitions_from(std::int64_t index) const;
    double rate(std::int64_t from, std::int64_t to) const; // incl. diagonal
};

/// Builds the generator. Requires zero diagonals on both infection matrices
/// (a node cannot infect itself in the probabilistic model) and n <= 12.
GeneratorMatrix build_generator(const Vector& delta1, const Vector& delta2, const Matrix& beta1,
                                const Matrix& beta2);

/// Independence product distribution with node marginals
/// (1 - x1_i - x2_i, x1_i, x2_i); a point mass for 0/1-valued inputs.
Vector initial_distribution(const Vector& x1, const Vector& x2);

struct ChainRunStats {
    double max_drift = 0.0;        // max per-step |sum(y) - 1| before renormalization
    bool healthy_monotone = true;  // absorbed mass never decreased (beyond 1e-12)
    double dt = 0.0;               // step size actually used
    long steps = 0;
    double exit_time = 0.0;
    bool early_exit = false;
};

/// Distribution at t_max via fixed-step RK4 on dy/dt = Q^T y, renormalized
/// each step. dt is capped at 0.1 / max|Q_kk| for stability. Integration may
/// stop early once the distribution is fully absorbed or numerically
/// stationary (||dy/dt||_1 <= 1e-12, so the remaining horizon moves the
/// answer by less than t_max * 1e-12 in the 1-norm).
Vector integrate_chain(const GeneratorMatrix& q, const Vector& y0, double t_max, double dt,
                       ChainRunStats* stats = nullptr);

/// Same dynamics for up to four distributions sharing one generator; the
/// columns are advanced in lock step through a fused kernel.
std::vector<Vector> integrate_chain_multi(const GeneratorMatrix& q, const std::vector<Vector>& y0s,
                                          double t_max, double dt, ChainRunStats* stats = nullptr);

/// Per-node infection probabilities (v1, v2): v1_i sums y over states whose
/// digit i equals 1, v2_i over digit 2.
std::pair<Vector, Vector> marginals(const Vector& y, int n);

/// || [v1(T); v2(T)] - [x1(T); x2(T)] ||_2 between the exact chain and the
/// mean-field dynamics started from matching initial conditions.
double meanfield_error(const BiVirusSystem& sys, const EpidemicState& x0, double t_final, double dt);

} // namespace bivirus

#endif
