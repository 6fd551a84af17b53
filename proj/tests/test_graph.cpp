#include <doctest.h>

#include "bivirus/graph.hpp"
#include "test_util.hpp"

using namespace bivirus;

TEST_CASE("line, star and complete generators match their definitions") {
    Matrix line3(3, 3);
    line3 << 0, 1, 0, 1, 0, 1, 0, 1, 0;
    CHECK(generate_graph(GraphKind::line, 3, false) == line3);

    Matrix star3(3, 3);
    star3 << 0, 1, 1, 1, 0, 0, 1, 0, 0;
    CHECK(generate_graph(GraphKind::star, 3, false) == star3);

    const Matrix k3 = generate_graph(GraphKind::complete, 3, false);
    CHECK(k3 == Matrix(Matrix::Ones(3, 3) - Matrix::Identity(3, 3)));

    CHECK_THROWS_AS(generate_graph(GraphKind::line, 0, false), ValidationError);
}

TEST_CASE("self-loop flag sets the diagonal") {
    const Matrix a = generate_graph(GraphKind::complete, 4, true);
    CHECK(a.diagonal() == Vector::Ones(4));
    const Matrix b = generate_graph(GraphKind::complete, 4, false);
    CHECK(b.diagonal() == Vector::Zero(4));
}

TEST_CASE("cycle is directed") {
    const Matrix c = generate_graph(GraphKind::cycle, 4, false);
    CHECK(c != Matrix(c.transpose()));
    CHECK(is_irreducible(c));
}

TEST_CASE("irreducibility matches strong connectivity") {
    CHECK(is_irreducible(generate_graph(GraphKind::complete, 3, false)));

    Matrix two_cliques = Matrix::Zero(4, 4);
    two_cliques(0, 1) = two_cliques(1, 0) = 1;
    two_cliques(2, 3) = two_cliques(3, 2) = 1;
    CHECK_FALSE(is_irreducible(two_cliques));

    // one-way bridge between the cliques is still not strongly connected
    two_cliques(2, 1) = 1;
    CHECK_FALSE(is_irreducible(two_cliques));

    CHECK_THROWS_AS(is_irreducible(Matrix::Zero(2, 3)), ValidationError);
}

TEST_CASE("n = 1 cases") {
    CHECK(generate_graph(GraphKind::complete, 1, false) == Matrix::Zero(1, 1));
    CHECK_FALSE(is_irreducible(Matrix::Zero(1, 1)));
    CHECK(is_irreducible(Matrix::Constant(1, 1, 2.0)));
}

TEST_CASE("generator outputs are symmetric and irreducible for n >= 2") {
    for (GraphKind kind : {GraphKind::line, GraphKind::star, GraphKind::complete}) {
        for (int n : {2, 3, 5, 8}) {
            const Matrix a = generate_graph(kind, n, false);
            CHECK(a == Matrix(a.transpose()));
            CHECK(is_irreducible(a));
            CHECK(is_irreducible(Matrix(a.transpose())));
        }
    }
}

TEST_CASE("homogeneous infection matrix scales the adjacency") {
    Matrix k2 = generate_graph(GraphKind::complete, 2, true);
    const InfectionBuild b = build_infection_matrix(k2, 2.0);
    CHECK(b.beta == Matrix(2.0 * Matrix::Ones(2, 2)));
    CHECK(b.irreducible);

    const Matrix line3 = generate_graph(GraphKind::line, 3, false);
    CHECK(build_infection_matrix(line3, 1.0).beta == line3);
}

TEST_CASE("per-arc rates must live on arcs") {
    const Matrix line3 = generate_graph(GraphKind::line, 3, false);
    Matrix rates = Matrix::Zero(3, 3);
    rates(0, 2) = 1.0; // (1,3) is not an arc of the path
    CHECK_THROWS_AS(build_infection_matrix(line3, rates), ValidationError);

    Matrix ok = Matrix::Zero(3, 3);
    ok(0, 1) = 0.5;
    ok(1, 0) = 1.5;
    ok(1, 2) = 2.5;
    ok(2, 1) = 3.5;
    const InfectionBuild b = build_infection_matrix(line3, ok);
    CHECK(b.beta == ok);
    CHECK(b.irreducible);

    CHECK_THROWS_AS(build_infection_matrix(line3, -1.0), ValidationError);
}

TEST_CASE("infection matrix preserves the zero pattern of the graph") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix g = testutil::random_infection(rng, 6, 0.4, 1.0, 1.0, false);
        std::uniform_real_distribution<double> rate(0.5, 2.0);
        Matrix rates = Matrix::Zero(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                if (g(i, j) != 0.0) rates(i, j) = rate(rng);
        const InfectionBuild b = build_infection_matrix(g, rates);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) CHECK((b.beta(i, j) != 0.0) == (g(i, j) != 0.0));
    }
}
