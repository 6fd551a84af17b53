#include <doctest.h>

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "bivirus/graph.hpp"
#include "bivirus/markov.hpp"
#include "test_util.hpp"

using namespace bivirus;

namespace {

// Test-only 2^n SIS chain: dense generator, solved with a matrix exponential.
// Independent route used to cross-check the ternary chain.
Matrix sis_generator(const Vector& delta, const Matrix& beta) {
    const int n = static_cast<int>(delta.size());
    const int states = 1 << n;
    Matrix q = Matrix::Zero(states, states);
    for (int s = 0; s < states; ++s) {
        for (int i = 0; i < n; ++i) {
            if (s & (1 << i)) {
                q(s, s ^ (1 << i)) += delta(i);
            } else {
                double rate = 0.0;
                for (int j = 0; j < n; ++j)
                    if (s & (1 << j)) rate += beta(i, j);
                if (rate > 0.0) q(s, s | (1 << i)) += rate;
            }
        }
        q(s, s) = -q.row(s).sum();
    }
    return q;
}

Matrix dense_generator(const GeneratorMatrix& q) {
    Matrix full = Matrix::Zero(q.num_states, q.num_states);
    for (std::int64_t k = 1; k <= q.num_states; ++k) {
        for (const Transition& t : q.transitions_from(k)) full(k - 1, t.to - 1) = t.rate;
        full(k - 1, k - 1) = q.rate(k, k);
    }
    return full;
}

} // namespace

TEST_CASE("ternary state indexing round-trips") {
    CHECK(state_index({0, 0}) == 1);
    CHECK(state_index({1, 2}) == 8); // 1 + 1 + 2*3
    CHECK(state_digits(8, 2) == std::vector<int>{1, 2});
    for (std::int64_t k = 1; k <= 27; ++k) CHECK(state_index(state_digits(k, 3)) == k);
    CHECK_THROWS_AS(state_index({0, 3}), ValidationError);
}

TEST_CASE("n = 1 chain has only healing transitions") {
    const Matrix zero = Matrix::Zero(1, 1);
    const GeneratorMatrix q =
        build_generator(Vector::Constant(1, 0.7), Vector::Constant(1, 1.3), zero, zero);
    CHECK(q.num_states == 3);
    CHECK(q.transitions_from(1).empty());
    const auto from_v1 = q.transitions_from(2);
    REQUIRE(from_v1.size() == 1);
    CHECK(from_v1[0].to == 1);
    CHECK(from_v1[0].rate == 0.7);
    const auto from_v2 = q.transitions_from(3);
    REQUIRE(from_v2.size() == 1);
    CHECK(from_v2[0].to == 1);
    CHECK(from_v2[0].rate == 1.3);
}

TEST_CASE("generator rejects bad inputs") {
    const Matrix with_diag = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(build_generator(Vector::Ones(2), Vector::Ones(2), with_diag, with_diag),
                    ValidationError);
    const Matrix big = Matrix::Zero(13, 13);
    CHECK_THROWS_AS(build_generator(Vector::Ones(13), Vector::Ones(13), big, big), ValidationError);
}

TEST_CASE("rate-out rows sum to zero and stay within 2n entries per state") {
    std::mt19937_64 rng(41);
    Matrix b1 = testutil::random_infection(rng, 3);
    Matrix b2 = testutil::random_infection(rng, 3);
    b1.diagonal().setZero();
    b2.diagonal().setZero();
    const GeneratorMatrix q = build_generator(Vector::Constant(3, 0.5), Vector::Constant(3, 0.8), b1, b2);
    for (std::int64_t k = 1; k <= q.num_states; ++k) {
        const auto out = q.transitions_from(k);
        CHECK(static_cast<int>(out.size()) <= 2 * q.n);
        double sum = q.rate(k, k);
        for (const Transition& t : out) sum += t.rate;
        CHECK(std::abs(sum) <= 1e-14);
    }
}

TEST_CASE("line-graph state (0,1) has exactly the two expected transitions") {
    const Matrix a = generate_graph(GraphKind::line, 2, false);
    const Matrix b = 0.9 * a;
    const GeneratorMatrix q = build_generator(Vector::Constant(2, 0.4), Vector::Constant(2, 0.6), b, b);
    const std::int64_t s01 = state_index({0, 1}); // node 2 carries virus 1
    auto out = q.transitions_from(s01);
    REQUIRE(out.size() == 2);
    // node 1 catches virus 1 from node 2
    CHECK(out[0].to == state_index({1, 1}));
    CHECK(out[0].rate == doctest::Approx(0.9));
    // node 2 heals
    CHECK(out[1].to == state_index({0, 0}));
    CHECK(out[1].rate == doctest::Approx(0.4));
}

TEST_CASE("healthy point mass is absorbing") {
    const Matrix a = generate_graph(GraphKind::line, 3, false);
    const GeneratorMatrix q = build_generator(Vector::Ones(3), Vector::Ones(3), a, a);
    Vector y0 = Vector::Zero(q.num_states);
    y0(0) = 1.0;
    const Vector yT = integrate_chain(q, y0, 5.0, 0.01);
    CHECK((yT - y0).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("n = 1 chain decays along the scalar exponential") {
    const Matrix zero = Matrix::Zero(1, 1);
    const GeneratorMatrix q = build_generator(Vector::Ones(1), Vector::Ones(1), zero, zero);
    Vector y0 = Vector::Zero(3);
    y0(1) = 1.0; // infected with virus 1
    const Vector y1 = integrate_chain(q, y0, 1.0, 0.01);
    CHECK(y1(0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-6));
    CHECK(y1(1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
}

TEST_CASE("chain integration matches the matrix exponential") {
    std::mt19937_64 rng(43);
    Matrix b1 = testutil::random_infection(rng, 3);
    Matrix b2 = testutil::random_infection(rng, 3);
    b1.diagonal().setZero();
    b2.diagonal().setZero();
    const Vector d1 = Vector::Constant(3, 0.6), d2 = Vector::Constant(3, 0.9);
    const GeneratorMatrix q = build_generator(d1, d2, b1, b2);

    Vector y0 = Vector::Zero(q.num_states);
    y0(state_index({1, 0, 2}) - 1) = 1.0;
    const double T = 3.0;
    ChainRunStats stats;
    const Vector y_rk = integrate_chain(q, y0, T, 0.01, &stats);

    const Matrix qt = dense_generator(q).transpose();
    const Vector y_exact = (T * qt).exp() * y0;
    CHECK((y_rk - y_exact).lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK(stats.max_drift <= 1e-10);
    CHECK(stats.healthy_monotone);
}

TEST_CASE("conservation and absorption monotonicity on a supercritical run") {
    const Matrix a = generate_graph(GraphKind::star, 4, false);
    const GeneratorMatrix q =
        build_generator(Vector::Constant(4, 0.2), Vector::Constant(4, 0.2), 1.0 * a, 1.0 * a);
    Vector y0 = Vector::Zero(q.num_states);
    y0(state_index({1, 2, 0, 0}) - 1) = 1.0;
    ChainRunStats stats;
    const Vector yT = integrate_chain(q, y0, 200.0, 0.05, &stats);
    CHECK(stats.max_drift <= 1e-10);
    CHECK(stats.healthy_monotone);
    CHECK(std::abs(yT.sum() - 1.0) <= 1e-10);
    auto [v1, v2] = marginals(yT, 4);
    CHECK(((v1 + v2).array() <= 1.0 + 1e-12).all());
}

TEST_CASE("marginals of simple distributions") {
    Vector point = Vector::Zero(9);
    point(state_index({1, 2}) - 1) = 1.0;
    auto [v1, v2] = marginals(point, 2);
    CHECK(v1(0) == 1.0);
    CHECK(v1(1) == 0.0);
    CHECK(v2(0) == 0.0);
    CHECK(v2(1) == 1.0);

    Vector healthy = Vector::Zero(9);
    healthy(0) = 1.0;
    auto [h1, h2] = marginals(healthy, 2);
    CHECK(h1.isZero(0.0));
    CHECK(h2.isZero(0.0));

    const Vector uniform = Vector::Constant(3, 1.0 / 3.0);
    auto [u1, u2] = marginals(uniform, 1);
    CHECK(u1(0) == doctest::Approx(1.0 / 3.0));
    CHECK(u2(0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("product initial distribution reproduces its marginals") {
    Vector x1(2), x2(2);
    x1 << 0.3, 0.1;
    x2 << 0.2, 0.6;
    const Vector y0 = initial_distribution(x1, x2);
    CHECK(y0.sum() == doctest::Approx(1.0).epsilon(1e-14));
    auto [v1, v2] = marginals(y0, 2);
    CHECK((v1 - x1).lpNorm<Eigen::Infinity>() <= 1e-14);
    CHECK((v2 - x2).lpNorm<Eigen::Infinity>() <= 1e-14);

    Vector bad(2);
    bad << 0.7, 0.1;
    CHECK_THROWS_AS(initial_distribution(bad, bad), ValidationError);
}

TEST_CASE("single-virus restriction of the chain matches an independent SIS chain") {
    const Matrix a = generate_graph(GraphKind::line, 4, false);
    const Matrix b = 0.8 * a;
    const Vector d = Vector::Constant(4, 0.5);
    const GeneratorMatrix q = build_generator(d, d, b, Matrix::Zero(4, 4));

    EpidemicState x0{Vector::Zero(4), Vector::Zero(4)};
    x0.x1(0) = 1.0;
    const Vector y0 = initial_distribution(x0.x1, x0.x2);
    const double T = 4.0;
    const Vector yT = integrate_chain(q, y0, T, 0.005);
    auto [v1, v2] = marginals(yT, 4);
    CHECK(v2.isZero(0.0));

    const Matrix sis_qt = sis_generator(d, b).transpose();
    Vector z0 = Vector::Zero(16);
    z0(1) = 1.0; // node 1 infected
    const Vector zT = (T * sis_qt).exp() * z0;
    Vector sis_marginal = Vector::Zero(4);
    for (int s = 0; s < 16; ++s)
        for (int i = 0; i < 4; ++i)
            if (s & (1 << i)) sis_marginal(i) += zT(s);
    CHECK((v1 - sis_marginal).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("mean-field error: zero at t = 0, small deep below threshold, larger near it") {
    const Matrix a = generate_graph(GraphKind::line, 4, false);
    const Vector ones = Vector::Ones(4);
    EpidemicState ic1{Vector::Zero(4), Vector::Zero(4)};
    ic1.x1(0) = 1.0;
    ic1.x2(1) = 1.0;

    BiVirusSystem weak{ones, ones, 0.1 * a, 0.1 * a};
    CHECK(meanfield_error(weak, ic1, 0.0, 0.01) == 0.0);
    CHECK(meanfield_error(weak, ic1, 10000.0, 0.01) <= 1e-3);

    BiVirusSystem near{Vector::Constant(4, 0.5), Vector::Constant(4, 0.5), 0.5 * a, 0.5 * a};
    CHECK(meanfield_error(near, ic1, 10000.0, 0.01) > meanfield_error(weak, ic1, 10000.0, 0.01));
}

TEST_CASE("lock-step multi-distribution integration equals one-at-a-time") {
    const Matrix a = generate_graph(GraphKind::star, 3, false);
    const GeneratorMatrix q =
        build_generator(Vector::Constant(3, 0.7), Vector::Constant(3, 0.7), 0.9 * a, 0.9 * a);
    std::vector<Vector> y0s;
    {
        EpidemicState s{Vector::Zero(3), Vector::Zero(3)};
        s.x1(0) = 1.0;
        s.x2(1) = 1.0;
        y0s.push_back(initial_distribution(s.x1, s.x2));
    }
    {
        EpidemicState s{Vector::Zero(3), Vector::Zero(3)};
        s.x1(0) = 1.0;
        s.x2(1) = s.x2(2) = 1.0;
        y0s.push_back(initial_distribution(s.x1, s.x2));
    }
    const auto multi = integrate_chain_multi(q, y0s, 50.0, 0.01);
    for (size_t k = 0; k < y0s.size(); ++k) {
        const Vector single = integrate_chain(q, y0s[k], 50.0, 0.01);
        CHECK((multi[k] - single).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
}
