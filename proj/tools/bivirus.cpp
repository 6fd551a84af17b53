#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bivirus/control.hpp"
#include "bivirus/csv.hpp"
#include "bivirus/markov.hpp"
#include "bivirus/runner.hpp"
#include "bivirus/sensitivity.hpp"

namespace fs = std::filesystem;
using namespace bivirus;

namespace {

ScenarioConfig require_config(const std::string& path) {
    if (path.empty()) throw ValidationError("--config is required for this subcommand");
    return load_scenario(path);
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
}

ApproxExperimentConfig parse_grid_config(const std::string& path) {
    ApproxExperimentConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw ValidationError("grid config: cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("grid config: invalid JSON: ") + e.what());
    }
    if (j.contains("graphs")) {
        cfg.graphs.clear();
        for (const auto& g : j.at("graphs")) cfg.graphs.push_back(graph_kind_from_string(g.get<std::string>()));
    }
    if (j.contains("n_values")) cfg.n_values = j.at("n_values").get<std::vector<int>>();
    if (j.contains("pairs")) {
        cfg.rate_pairs.clear();
        for (const auto& p : j.at("pairs")) {
            if (!p.is_array() || p.size() != 2) throw ValidationError("grid config: pairs must be [beta, delta]");
            cfg.rate_pairs.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
    }
    if (j.contains("initial_conditions"))
        cfg.initial_ids = j.at("initial_conditions").get<std::vector<std::string>>();
    if (j.contains("T")) cfg.t_final = j.at("T").get<double>();
    if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
    if (j.contains("max_n")) cfg.max_n = j.at("max_n").get<int>();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bi-virus epidemic toolkit: thresholds, equilibria, simulation, exact chain comparison"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    int jobs = 1;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "scenario or grid config file (JSON)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--jobs", jobs, "parallel worker threads for sweeps");
    app.add_option("--seed", seed, "seed for randomized searches");

    auto* cmd_analyze = app.add_subcommand("analyze", "thresholds, regime, equilibria and stability");
    int interior_starts = 0;
    bool echo = false;
    cmd_analyze->add_option("--search-interior", interior_starts,
                            "also search for interior equilibria from N random starts (heuristic)");
    cmd_analyze->add_flag("--echo-config", echo, "print the canonical form of the parsed config");

    auto* cmd_simulate = app.add_subcommand("simulate", "integrate the scenario and write the trajectory CSV");
    auto* cmd_markov = app.add_subcommand("markov-compare",
                                          "mean-field vs exact-chain gap at the scenario horizon");
    auto* cmd_sens = app.add_subcommand("sensitivity", "equilibrium sensitivity Jacobians of virus 1 (CSV)");
    auto* cmd_control = app.add_subcommand("control", "feedback-control demonstrations on the scenario graph");
    double gain = 1.0;
    cmd_control->add_option("--gain", gain, "proportional feedback gain (uniform, both viruses)");
    auto* cmd_approx = app.add_subcommand("approx-experiment",
                                          "mean-field approximation error sweep over graphs/n/rates");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_analyze) {
            const ScenarioConfig cfg = require_config(config_path);
            if (echo) {
                std::cout << echo_scenario(cfg);
                return 0;
            }
            print_report(std::cout, analyze(cfg, interior_starts, seed));
        } else if (*cmd_simulate) {
            const ScenarioConfig cfg = require_config(config_path);
            print_report(std::cout, run_scenario(cfg, out_dir));
        } else if (*cmd_markov) {
            const ScenarioConfig cfg = require_config(config_path);
            const double err =
                meanfield_error(cfg.system, cfg.initial, cfg.integrator.t_max, cfg.integrator.dt);
            std::cout << "T: " << format_double(cfg.integrator.t_max) << "\n";
            std::cout << "error: " << format_double(err) << "\n";
            std::ostringstream csv;
            csv << "graph,n,beta,delta,init_id,T,error\n";
            csv << (cfg.graph_kind ? to_string(*cfg.graph_kind) : std::string("custom")) << "," << cfg.n
                << "," << format_double(cfg.system.beta1.maxCoeff()) << ","
                << format_double(cfg.system.delta1.maxCoeff()) << "," << cfg.initial_name << ","
                << format_double(cfg.integrator.t_max) << "," << format_double(err) << "\n";
            write_file(fs::path(out_dir) / "markov_compare.csv", csv.str());
            std::cout << "file: " << (fs::path(out_dir) / "markov_compare.csv").string() << "\n";
        } else if (*cmd_sens) {
            const ScenarioConfig cfg = require_config(config_path);
            auto [d_delta, d_beta] = sensitivity_jacobians(cfg.system.delta1, cfg.system.beta1);
            const int n = cfg.n;
            std::ostringstream sd;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) sd << (j ? "," : "") << format_double(d_delta(i, j));
                sd << "\n";
            }
            std::ostringstream sb;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n * n; ++j) sb << (j ? "," : "") << format_double(d_beta(i, j));
                sb << "\n";
            }
            write_file(fs::path(out_dir) / "sensitivity_delta.csv", sd.str());
            write_file(fs::path(out_dir) / "sensitivity_beta.csv", sb.str());
            std::cout << "columns: delta file d(x*_i)/d(delta_j); beta file column j*n+k is d(x*_i)/d(beta_jk) "
                         "(1-based j,k)\n";
            std::cout << "file: " << (fs::path(out_dir) / "sensitivity_delta.csv").string() << "\n";
            std::cout << "file: " << (fs::path(out_dir) / "sensitivity_beta.csv").string() << "\n";
        } else if (*cmd_control) {
            const ScenarioConfig cfg = require_config(config_path);
            const Matrix& beta1 = cfg.system.beta1;
            const int n = cfg.n;

            const Vector stab = constant_rate_stabilizer(beta1);
            IntegratorConfig icfg = cfg.integrator;
            const Trajectory decay =
                integrate_single(stab, beta1, Vector::Constant(n, 0.9), icfg);
            std::ostringstream decay_csv;
            Trajectory padded = decay; // single-virus trajectory: reuse the 2n-column writer with x2 = 0
            for (auto& s : padded.states) {
                Vector both = Vector::Zero(2 * n);
                both.head(n) = s;
                s = both;
            }
            write_trajectory_csv(decay_csv, padded, n);
            write_file(fs::path(out_dir) / "constant_rate_decay.csv", decay_csv.str());
            std::cout << "constant_rate_delta: ";
            for (int i = 0; i < n; ++i) std::cout << (i ? " " : "") << format_double(stab(i));
            std::cout << "\nconstant_rate_final_norm: "
                      << format_double(decay.states.back().lpNorm<Eigen::Infinity>()) << "\n";

            const Vector k = Vector::Constant(n, gain);
            const Vector xeq = controlled_equilibrium_single(k, beta1);
            std::cout << "controlled_equilibrium: ";
            for (int i = 0; i < n; ++i) std::cout << (i ? " " : "") << format_double(xeq(i));
            std::cout << "\n";

            const ImpossibilityReport single =
                impossibility_demo_single(k, beta1, Vector::Constant(n, 1e-6), icfg);
            std::cout << "single_late_window_min: " << format_double(single.late_window_min)
                      << "  floor: " << format_double(single.floor)
                      << "  above: " << (single.stays_above_floor ? "yes" : "no")
                      << "  final_gap: " << format_double(single.final_gap) << "\n";

            ControlGains gains{k, k};
            EpidemicState x0{Vector::Constant(n, 0.2), Vector::Constant(n, 0.2)};
            const ImpossibilityReport both =
                impossibility_demo(gains, beta1, cfg.system.beta2, x0, icfg);
            std::ostringstream both_csv;
            write_trajectory_csv(both_csv, both.trajectory, n);
            write_file(fs::path(out_dir) / "controlled_bivirus.csv", both_csv.str());
            std::cout << "bivirus_late_window_min: " << format_double(both.late_window_min)
                      << "  floor: " << format_double(both.floor)
                      << "  above: " << (both.stays_above_floor ? "yes" : "no") << "\n";
            std::cout << "file: " << (fs::path(out_dir) / "constant_rate_decay.csv").string() << "\n";
            std::cout << "file: " << (fs::path(out_dir) / "controlled_bivirus.csv").string() << "\n";
        } else if (*cmd_approx) {
            ApproxExperimentConfig cfg = parse_grid_config(config_path);
            cfg.jobs = jobs;
            const auto cells = run_approx_experiment(cfg);
            std::ostringstream csv;
            write_approx_csv(csv, cells);
            const fs::path path = fs::path(out_dir) / "approx_experiment.csv";
            write_file(path, csv.str());
            std::cout << "rows: " << cells.size() << "\n";
            std::cout << "file: " << path.string() << "\n";
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
