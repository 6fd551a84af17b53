#ifndef BIVIRUS_RUNNER_HPP
#define BIVIRUS_RUNNER_HPP

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bivirus/equilibria.hpp"
#include "bivirus/graph.hpp"
#include "bivirus/scenario.hpp"
#include "bivirus/spectral.hpp"

namespace bivirus {

struct RunReport {
    RegimeLabel regime = RegimeLabel::HealthyGlobal;
    ThresholdIndicators virus1, virus2;
    std::vector<EquilibriumReport> equilibria;
    std::vector<double> coexistence_alphas;
    std::vector<std::pair<Vector, Vector>> coexistence_points;
    std::string coexistence_note;
    bool interior_may_exist = false; // both supercritical, no coexistence structure

    bool simulated = false;
    Termination termination = Termination::horizon;
    EpidemicState final_state;
    double final_residual = 0.0;

    std::vector<std::string> files;
    double wall_seconds = 0.0;
};

/// Thresholds, regime, boundary equilibria with stability; for equal-ratio
/// same-graph viruses also a sample of the coexistence family at
/// alpha in {0.5, 1, 2}. Deterministic output ordering, no integration.
RunReport analyze(const ScenarioConfig& cfg);

/// analyze plus optional heuristic interior-equilibrium search (non-exhaustive,
/// labeled "interior" in the report).
RunReport analyze(const ScenarioConfig& cfg, int interior_starts, std::uint64_t seed);

/// Full run: analyze, integrate the configured initial condition, write the
/// trajectory CSV (columns t, x1_1..x1_n, x2_1..x2_n) into out_dir.
RunReport run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

void print_report(std::ostream& os, const RunReport& report);

// ---- mean-field vs chain approximation sweep ----

struct ApproxExperimentConfig {
    std::vector<GraphKind> graphs{GraphKind::line, GraphKind::star, GraphKind::complete};
    std::vector<int> n_values{4, 6, 8};
    std::vector<std::pair<double, double>> rate_pairs; // (beta, delta); empty = stock grid
    std::vector<std::string> initial_ids{"ic1", "ic2", "ic3"};
    double t_final = 10000.0;
    double dt = 0.01;       // mean-field step
    double chain_dt = 0.05; // chain step request; the 0.1/max|Q_kk| cap usually binds
    int jobs = 1;
    int max_n = 8; // guard; raise explicitly to go bigger (hard cap 12)
};

/// The stock (beta, delta) grid spanning beta/delta from 0.1 to 10.
std::vector<std::pair<double, double>> approx_default_pairs();

struct ApproxCell {
    std::string graph;
    int n = 0;
    double beta = 0.0, delta = 0.0;
    std::string init_id;
    double t_final = 0.0;
    double error = 0.0;
    // chain diagnostics, not part of the CSV schema
    double chain_max_drift = 0.0;
    bool chain_healthy_monotone = true;
};

/// One cell per (graph, n, pair, initial condition), in that nesting order.
/// Cells sharing a generator integrate their chains in lock step; bundles run
/// on `jobs` worker threads and are merged deterministically by index.
std::vector<ApproxCell> run_approx_experiment(const ApproxExperimentConfig& cfg);

/// CSV schema: graph,n,beta,delta,init_id,T,error.
void write_approx_csv(std::ostream& os, const std::vector<ApproxCell>& cells);

} // namespace bivirus

#endif
