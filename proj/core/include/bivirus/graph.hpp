#ifndef BIVIRUS_GRAPH_HPP
#define BIVIRUS_GRAPH_HPP

#include <string_view>

#include "bivirus/types.hpp"

namespace bivirus {

// Arc convention everywhere in this library: entry (i, j) > 0 means an arc
// from vertex j to vertex i, i.e. row i receives from column j.

enum class GraphKind { line, star, complete, cycle };

GraphKind graph_kind_from_string(std::string_view name);
std::string to_string(GraphKind kind);

/// Binary adjacency matrix of one of the stock graph families.
/// line/star/complete are symmetric; cycle is the directed n-cycle.
/// The star hub is node 0 (the first node).
Matrix generate_graph(GraphKind kind, int n, bool self_loops);

/// True iff the directed graph of nonzero entries is strongly connected.
/// A 1x1 matrix counts as irreducible only if its entry is nonzero.
bool is_irreducible(const Matrix& m);

struct InfectionBuild {
    Matrix beta;
    bool irreducible;
};

/// B = rate * A (homogeneous). Zero pattern of the graph is preserved exactly.
InfectionBuild build_infection_matrix(const Matrix& graph, double rate);

/// Entrywise product of per-arc rates with the graph's arc pattern.
/// A positive rate on a missing arc is rejected.
InfectionBuild build_infection_matrix(const Matrix& graph, const Matrix& rates);

} // namespace bivirus

#endif
