#include "bivirus/graph.hpp"

#include <vector>

namespace bivirus {

GraphKind graph_kind_from_string(std::string_view name) {
    if (name == "line") return GraphKind::line;
    if (name == "star") return GraphKind::star;
    if (name == "complete") return GraphKind::complete;
    if (name == "cycle") return GraphKind::cycle;
    throw ValidationError("unknown graph kind: " + std::string(name));
}

std::string to_string(GraphKind kind) {
    switch (kind) {
        case GraphKind::line: return "line";
        case GraphKind::star: return "star";
        case GraphKind::complete: return "complete";
        case GraphKind::cycle: return "cycle";
    }
    return "?";
}

Matrix generate_graph(GraphKind kind, int n, bool self_loops) {
    if (n < 1) throw ValidationError("generate_graph: n must be >= 1");
    Matrix a = Matrix::Zero(n, n);
    switch (kind) {
        case GraphKind::line:
            for (int i = 0; i + 1 < n; ++i) {
                a(i, i + 1) = 1.0;
                a(i + 1, i) = 1.0;
            }
            break;
        case GraphKind::star:
            for (int i = 1; i < n; ++i) {
                a(0, i) = 1.0;
                a(i, 0) = 1.0;
            }
            break;
        case GraphKind::complete:
            a.setOnes();
            a.diagonal().setZero();
            break;
        case GraphKind::cycle:
            for (int i = 0; i < n; ++i) a((i + 1) % n, i) = 1.0;
            if (n == 1) a(0, 0) = 0.0;
            break;
    }
    if (self_loops) a.diagonal().setOnes();
    return a;
}

namespace {

// Reachability of every vertex from `start` following arcs in the direction
// given by `transpose`.
bool all_reachable(const Matrix& m, int start, bool transpose) {
    const int n = static_cast<int>(m.rows());
    std::vector<char> seen(n, 0);
    std::vector<int> stack{start};
    seen[start] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int w = 0; w < n; ++w) {
            const double e = transpose ? m(u, w) : m(w, u);
            if (e != 0.0 && !seen[w]) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
        }
    }
    return count == n;
}

} // namespace

bool is_irreducible(const Matrix& m) {
    if (m.rows() != m.cols()) throw ValidationError("is_irreducible: matrix must be square");
    if (m.rows() == 0) throw ValidationError("is_irreducible: empty matrix");
    if ((m.array() < 0.0).any()) throw ValidationError("is_irreducible: negative entries");
    if (m.rows() == 1) return m(0, 0) != 0.0;
    return all_reachable(m, 0, false) && all_reachable(m, 0, true);
}

InfectionBuild build_infection_matrix(const Matrix& graph, double rate) {
    if (graph.rows() != graph.cols()) throw ValidationError("build_infection_matrix: graph must be square");
    if (rate < 0.0) throw ValidationError("build_infection_matrix: negative rate");
    InfectionBuild out;
    out.beta = rate * graph;
    out.irreducible = is_irreducible(out.beta);
    return out;
}

InfectionBuild build_infection_matrix(const Matrix& graph, const Matrix& rates) {
    if (graph.rows() != graph.cols()) throw ValidationError("build_infection_matrix: graph must be square");
    if (rates.rows() != graph.rows() || rates.cols() != graph.cols())
        throw ValidationError("build_infection_matrix: rate matrix dimension mismatch");
    if ((rates.array() < 0.0).any()) throw ValidationError("build_infection_matrix: negative rate");
    const int n = static_cast<int>(graph.rows());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (rates(i, j) > 0.0 && graph(i, j) == 0.0)
                throw ValidationError("build_infection_matrix: rate on missing arc (" + std::to_string(i + 1) +
                                      "," + std::to_string(j + 1) + ")");
    InfectionBuild out;
    out.beta = rates.cwiseProduct((graph.array() != 0.0).cast<double>().matrix());
    out.irreducible = is_irreducible(out.beta);
    return out;
}

} // namespace bivirus
