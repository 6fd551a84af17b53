#include "bivirus/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "bivirus/csv.hpp"
#include "bivirus/markov.hpp"

namespace bivirus {

namespace {

std::string vec_to_string(const Vector& v) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_double(v(i));
    }
    return out + "]";
}

RunReport analyze_impl(const ScenarioConfig& cfg, int interior_starts, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const BiVirusSystem& sys = cfg.system;
    sys.validate();

    RunReport rep;
    rep.virus1 = threshold_indicators(sys.delta1, sys.beta1);
    rep.virus2 = threshold_indicators(sys.delta2, sys.beta2);
    rep.regime = classify_regime_from_abscissas(rep.virus1.s, rep.virus2.s);
    rep.equilibria = boundary_equilibria(sys);

    const CoexistenceStructure st = coexistence_structure(sys);
    if (st.applicable && rep.virus1.s > 0.0) {
        for (double alpha : {0.5, 1.0, 2.0}) {
            auto [x1, x2] = coexistence_pair(sys, alpha);
            EquilibriumReport r = classify_stability(sys, EpidemicState{x1, x2});
            r.label = "coexistence(alpha=" + format_double(alpha) + ")";
            rep.coexistence_alphas.push_back(alpha);
            rep.coexistence_points.emplace_back(std::move(x1), std::move(x2));
            rep.equilibria.push_back(std::move(r));
        }
        rep.coexistence_note = "one coexisting equilibrium per alpha > 0 with x1 = alpha * x2";
    } else if (rep.regime == RegimeLabel::BothSupercritical) {
        rep.interior_may_exist = true;
        rep.coexistence_note = st.reason;
    }

    if (interior_starts > 0) {
        IntegratorConfig icfg = cfg.integrator;
        auto found = search_interior_equilibria(sys, interior_starts, seed, icfg);
        for (auto& r : found) rep.equilibria.push_back(std::move(r));
    }

    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

} // namespace

RunReport analyze(const ScenarioConfig& cfg) { return analyze_impl(cfg, 0, 0); }

RunReport analyze(const ScenarioConfig& cfg, int interior_starts, std::uint64_t seed) {
    return analyze_impl(cfg, interior_starts, seed);
}

RunReport run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep = analyze_impl(cfg, 0, 0);

    const Trajectory traj = integrate_bivirus(cfg.system, cfg.initial, cfg.integrator);
    rep.simulated = true;
    rep.termination = traj.termination;
    rep.final_state = unstack(traj.states.back());
    rep.final_residual = traj.final_residual;

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path path = std::filesystem::path(out_dir) / cfg.trajectory_file;
    std::ofstream out(path);
    if (!out) throw ValidationError("run_scenario: cannot write " + path.string());
    write_trajectory_csv(out, traj, cfg.n);
    out.close();
    rep.files.push_back(path.string());

    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

void print_report(std::ostream& os, const RunReport& report) {
    os << "regime: " << to_string(report.regime) << "\n";
    os << "s1: " << format_double(report.virus1.s);
    if (report.virus1.rho) os << "  rho1: " << format_double(*report.virus1.rho);
    os << (report.virus1.critical ? "  (critical)" : "") << "\n";
    os << "s2: " << format_double(report.virus2.s);
    if (report.virus2.rho) os << "  rho2: " << format_double(*report.virus2.rho);
    os << (report.virus2.critical ? "  (critical)" : "") << "\n";
    for (const auto& eq : report.equilibria) {
        os << "equilibrium: " << eq.label << "\n";
        os << "  point: x1=" << vec_to_string(eq.point.x1) << " x2=" << vec_to_string(eq.point.x2) << "\n";
        os << "  residual: " << format_double(eq.residual) << "\n";
        os << "  spectrum:";
        for (const auto& ev : eq.spectrum) {
            os << " " << format_double(ev.real());
            if (ev.imag() != 0.0) os << (ev.imag() > 0 ? "+" : "") << format_double(ev.imag()) << "i";
        }
        os << "\n";
        os << "  stability: " << to_string(eq.stability) << "\n";
        os << "  regime: " << to_string(eq.regime) << "\n";
    }
    if (!report.coexistence_note.empty()) os << "coexistence: " << report.coexistence_note << "\n";
    if (report.interior_may_exist)
        os << "note: both viruses are supercritical; interior equilibria may exist beyond the ones "
              "listed (heuristic search only, non-exhaustive)\n";
    if (report.simulated) {
        os << "termination: " << to_string(report.termination) << "\n";
        os << "final: x1=" << vec_to_string(report.final_state.x1)
           << " x2=" << vec_to_string(report.final_state.x2) << "\n";
        os << "final_residual: " << format_double(report.final_residual) << "\n";
    }
    for (const auto& f : report.files) os << "file: " << f << "\n";
    os << "wall_seconds: " << format_double(report.wall_seconds) << "\n";
}

std::vector<std::pair<double, double>> approx_default_pairs() {
    return {{0.1, 1.0}, {0.215, 1.0}, {0.464, 1.0}, {0.5, 0.5}, {1.0, 0.464}, {1.0, 0.215}, {1.0, 0.1}};
}

std::vector<ApproxCell> run_approx_experiment(const ApproxExperimentConfig& cfg) {
    ApproxExperimentConfig c = cfg;
    if (c.rate_pairs.empty()) c.rate_pairs = approx_default_pairs();
    if (c.max_n > 12) throw ValidationError("approx experiment: max_n capped at 12");
    for (int n : c.n_values)
        if (n < 4 || n > c.max_n)
            throw ValidationError("approx experiment: n = " + std::to_string(n) + " outside [4, " +
                                  std::to_string(c.max_n) + "]");
    if (c.initial_ids.empty() || c.initial_ids.size() > 4)
        throw ValidationError("approx experiment: between 1 and 4 initial conditions");

    struct Bundle {
        GraphKind kind;
        int n;
        double beta, delta;
    };
    std::vector<Bundle> bundles;
    for (GraphKind g : c.graphs)
        for (int n : c.n_values)
            for (auto [beta, delta] : c.rate_pairs) bundles.push_back({g, n, beta, delta});

    const size_t ics = c.initial_ids.size();
    std::vector<ApproxCell> cells(bundles.size() * ics);

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t b = next.fetch_add(1); b < bundles.size(); b = next.fetch_add(1)) {
            const Bundle& bd = bundles[b];
            const Matrix adjacency = generate_graph(bd.kind, bd.n, /*self_loops=*/false);
            const Matrix beta_mat = bd.beta * adjacency;
            const Vector delta_vec = Vector::Constant(bd.n, bd.delta);
            BiVirusSystem sys{delta_vec, delta_vec, beta_mat, beta_mat};

            const GeneratorMatrix q = build_generator(delta_vec, delta_vec, beta_mat, beta_mat);
            std::vector<EpidemicState> states;
            std::vector<Vector> y0s;
            for (const auto& id : c.initial_ids) {
                states.push_back(named_initial_condition(id, bd.n));
                y0s.push_back(initial_distribution(states.back().x1, states.back().x2));
            }
            ChainRunStats stats;
            const std::vector<Vector> finals = integrate_chain_multi(q, y0s, c.t_final, c.chain_dt, &stats);

            IntegratorConfig icfg;
            icfg.dt = c.dt;
            icfg.t_max = c.t_final;
            icfg.convergence_tol = 1e-13;
            for (size_t k = 0; k < ics; ++k) {
                auto [v1, v2] = marginals(finals[k], bd.n);
                const Trajectory traj = integrate_bivirus(sys, states[k], icfg);
                const EpidemicState xT = unstack(traj.states.back());
                ApproxCell& cell = cells[b * ics + k];
                cell.graph = to_string(bd.kind);
                cell.n = bd.n;
                cell.beta = bd.beta;
                cell.delta = bd.delta;
                cell.init_id = c.initial_ids[k];
                cell.t_final = c.t_final;
                cell.error = std::sqrt((v1 - xT.x1).squaredNorm() + (v2 - xT.x2).squaredNorm());
                cell.chain_max_drift = stats.max_drift;
                cell.chain_healthy_monotone = stats.healthy_monotone;
            }
        }
    };

    const int jobs = std::max(1, std::min<int>(c.jobs, static_cast<int>(bundles.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto guarded = [&]() {
            try {
                worker();
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int t = 0; t < jobs; ++t) pool.emplace_back(guarded);
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }
    return cells;
}

void write_approx_csv(std::ostream& os, const std::vector<ApproxCell>& cells) {
    os << "graph,n,beta,delta,init_id,T,error\n";
    for (const auto& cell : cells) {
        os << cell.graph << "," << cell.n << "," << format_double(cell.beta) << ","
           << format_double(cell.delta) << "," << cell.init_id << "," << format_double(cell.t_final)
           << "," << format_double(cell.error) << "\n";
    }
}

} // namespace bivirus
