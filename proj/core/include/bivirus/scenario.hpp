#ifndef BIVIRUS_SCENARIO_HPP
#define BIVIRUS_SCENARIO_HPP

#include <optional>
#include <string>

#include "bivirus/dynamics.hpp"
#include "bivirus/graph.hpp"
#include "bivirus/types.hpp"

namespace bivirus {

// Scenario files are JSON:
//
// {
//   "n": 4,
//   "graph": {"kind": "line", "self_loops": false},   // or {"adjacency": [[...], ...]}
//   "virus1": {"delta": 1.0, "beta": 0.5},            // scalars broadcast; vectors/matrices literal
//   "virus2": {"delta": [..], "beta": [[..], ..]},    // per-arc beta must live on graph arcs
//   "initial": "ic1",                                 // ic1 | ic2 | ic3 | {"x1": [...], "x2": [...]}
//   "integrator": {"dt": 0.01, "t_max": 10000, "convergence_tol": 1e-10, "clamp_tol": 1e-9},
//   "output": {"trajectory": "trajectory.csv"}
// }
//
// Named initial conditions: ic1 seeds node 1 with virus 1 and node 2 with
// virus 2; ic2 seeds nodes 1-2 with virus 1 and nodes 3-4 with virus 2;
// ic3 seeds node 1 with virus 1 and all remaining nodes with virus 2.

struct ScenarioConfig {
    int n = 0;
    Matrix adjacency;
    std::optional<GraphKind> graph_kind;
    bool self_loops = false;

    BiVirusSystem system;
    EpidemicState initial;
    std::string initial_name = "explicit";
    IntegratorConfig integrator;
    std::string trajectory_file = "trajectory.csv";
};

/// Parses and fully validates a scenario; failures carry the offending field.
ScenarioConfig parse_scenario_text(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

/// Canonical JSON form of a parsed scenario: explicit adjacency, vectors and
/// matrices. Re-parsing the echo yields an identical system.
std::string echo_scenario(const ScenarioConfig& cfg);

/// The named initial patterns ic1/ic2/ic3.
EpidemicState named_initial_condition(const std::string& id, int n);

} // namespace bivirus

#endif
