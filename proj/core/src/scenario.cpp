#include "bivirus/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bivirus {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
    throw ValidationError(field + ": " + message);
}

Vector parse_vector(const json& j, const std::string& field, int n) {
    if (j.is_number()) return Vector::Constant(n, j.get<double>());
    if (!j.is_array()) fail(field, "expected a number or an array of length n");
    if (static_cast<int>(j.size()) != n) fail(field, "expected length " + std::to_string(n));
    Vector v(n);
    for (int i = 0; i < n; ++i) {
        if (!j[i].is_number()) fail(field, "entry " + std::to_string(i + 1) + " is not a number");
        v(i) = j[i].get<double>();
    }
    return v;
}

Matrix parse_matrix(const json& j, const std::string& field, int n) {
    if (!j.is_array() || static_cast<int>(j.size()) != n) fail(field, "expected " + std::to_string(n) + " rows");
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        const json& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            fail(field, "row " + std::to_string(i + 1) + " must have " + std::to_string(n) + " entries");
        for (int k = 0; k < n; ++k) {
            if (!row[k].is_number()) fail(field, "entry (" + std::to_string(i + 1) + "," +
                                                     std::to_string(k + 1) + ") is not a number");
            m(i, k) = row[k].get<double>();
        }
    }
    return m;
}

std::pair<Vector, Matrix> parse_virus(const json& j, const std::string& field, const Matrix& adjacency) {
    const int n = static_cast<int>(adjacency.rows());
    if (!j.is_object()) fail(field, "expected an object with delta and beta");
    if (!j.contains("delta")) fail(field + ".delta", "missing");
    if (!j.contains("beta")) fail(field + ".beta", "missing");
    Vector delta = parse_vector(j.at("delta"), field + ".delta", n);
    if ((delta.array() < 0.0).any()) fail(field + ".delta", "healing rates must be nonnegative");

    InfectionBuild build;
    const json& jb = j.at("beta");
    try {
        if (jb.is_number()) {
            build = build_infection_matrix(adjacency, jb.get<double>());
        } else if (jb.is_array() && !jb.empty() && jb[0].is_array()) {
            build = build_infection_matrix(adjacency, parse_matrix(jb, field + ".beta", n));
        } else {
            fail(field + ".beta", "expected a scalar rate or an n x n matrix");
        }
    } catch (const ValidationError& e) {
        fail(field + ".beta", e.what());
    }
    if (!build.irreducible) fail(field + ".beta", "resulting infection matrix is reducible");
    return {std::move(delta), std::move(build.beta)};
}

} // namespace

EpidemicState named_initial_condition(const std::string& id, int n) {
    EpidemicState st{Vector::Zero(n), Vector::Zero(n)};
    if (id == "ic1") {
        if (n < 2) throw ValidationError("initial: ic1 needs n >= 2");
        st.x1(0) = 1.0;
        st.x2(1) = 1.0;
    } else if (id == "ic2") {
        if (n < 4) throw ValidationError("initial: ic2 needs n >= 4");
        st.x1(0) = st.x1(1) = 1.0;
        st.x2(2) = st.x2(3) = 1.0;
    } else if (id == "ic3") {
        if (n < 2) throw ValidationError("initial: ic3 needs n >= 2");
        st.x1(0) = 1.0;
        for (int i = 1; i < n; ++i) st.x2(i) = 1.0;
    } else {
        throw ValidationError("initial: unknown pattern '" + id + "' (expected ic1, ic2 or ic3)");
    }
    return st;
}

ScenarioConfig parse_scenario_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config: top level must be an object");

    ScenarioConfig cfg;
    if (!j.contains("n") || !j.at("n").is_number_integer()) fail("n", "missing or not an integer");
    cfg.n = j.at("n").get<int>();
    if (cfg.n < 1) fail("n", "must be >= 1");

    if (!j.contains("graph") || !j.at("graph").is_object()) fail("graph", "missing or not an object");
    const json& jg = j.at("graph");
    if (jg.contains("adjacency")) {
        cfg.adjacency = parse_matrix(jg.at("adjacency"), "graph.adjacency", cfg.n);
        if ((cfg.adjacency.array() < 0.0).any()) fail("graph.adjacency", "entries must be nonnegative");
    } else if (jg.contains("kind")) {
        if (!jg.at("kind").is_string()) fail("graph.kind", "must be a string");
        try {
            cfg.graph_kind = graph_kind_from_string(jg.at("kind").get<std::string>());
        } catch (const ValidationError& e) {
            fail("graph.kind", e.what());
        }
        cfg.self_loops = jg.value("self_loops", false);
        cfg.adjacency = generate_graph(*cfg.graph_kind, cfg.n, cfg.self_loops);
    } else {
        fail("graph", "needs either kind or adjacency");
    }

    if (!j.contains("virus1")) fail("virus1", "missing");
    if (!j.contains("virus2")) fail("virus2", "missing");
    std::tie(cfg.system.delta1, cfg.system.beta1) = parse_virus(j.at("virus1"), "virus1", cfg.adjacency);
    std::tie(cfg.system.delta2, cfg.system.beta2) = parse_virus(j.at("virus2"), "virus2", cfg.adjacency);

    if (j.contains("initial")) {
        const json& ji = j.at("initial");
        if (ji.is_string()) {
            cfg.initial_name = ji.get<std::string>();
            cfg.initial = named_initial_condition(cfg.initial_name, cfg.n);
        } else if (ji.is_object()) {
            if (!ji.contains("x1") || !ji.contains("x2")) fail("initial", "needs x1 and x2");
            cfg.initial.x1 = parse_vector(ji.at("x1"), "initial.x1", cfg.n);
            cfg.initial.x2 = parse_vector(ji.at("x2"), "initial.x2", cfg.n);
            cfg.initial_name = "explicit";
        } else {
            fail("initial", "expected a pattern name or {x1, x2}");
        }
    } else {
        cfg.initial_name = "ic1";
        cfg.initial = named_initial_condition("ic1", cfg.n);
    }
    if (!in_domain(cfg.initial))
        fail("initial", "x1, x2 must be nonnegative with x1 + x2 <= 1 entrywise");

    if (j.contains("integrator")) {
        const json& js = j.at("integrator");
        if (!js.is_object()) fail("integrator", "must be an object");
        cfg.integrator.dt = js.value("dt", cfg.integrator.dt);
        cfg.integrator.t_max = js.value("t_max", cfg.integrator.t_max);
        cfg.integrator.convergence_tol = js.value("convergence_tol", cfg.integrator.convergence_tol);
        cfg.integrator.clamp_tol = js.value("clamp_tol", cfg.integrator.clamp_tol);
        cfg.integrator.record_stride = js.value("record_stride", cfg.integrator.record_stride);
        if (cfg.integrator.dt <= 0.0) fail("integrator.dt", "must be positive");
        if (cfg.integrator.t_max <= 0.0) fail("integrator.t_max", "must be positive");
        if (cfg.integrator.convergence_tol <= 0.0) fail("integrator.convergence_tol", "must be positive");
        if (cfg.integrator.clamp_tol <= 0.0) fail("integrator.clamp_tol", "must be positive");
    }

    if (j.contains("output")) {
        const json& jo = j.at("output");
        if (!jo.is_object()) fail("output", "must be an object");
        cfg.trajectory_file = jo.value("trajectory", cfg.trajectory_file);
    }

    try {
        cfg.system.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

std::string echo_scenario(const ScenarioConfig& cfg) {
    json j;
    j["n"] = cfg.n;
    json adj = json::array();
    for (int i = 0; i < cfg.n; ++i) {
        json row = json::array();
        for (int k = 0; k < cfg.n; ++k) row.push_back(cfg.adjacency(i, k));
        adj.push_back(std::move(row));
    }
    j["graph"] = {{"adjacency", std::move(adj)}};
    auto dump_virus = [&](const Vector& delta, const Matrix& beta) {
        json v;
        json d = json::array();
        for (int i = 0; i < cfg.n; ++i) d.push_back(delta(i));
        json b = json::array();
        for (int i = 0; i < cfg.n; ++i) {
            json row = json::array();
            for (int k = 0; k < cfg.n; ++k) row.push_back(beta(i, k));
            b.push_back(std::move(row));
        }
        v["delta"] = std::move(d);
        v["beta"] = std::move(b);
        return v;
    };
    j["virus1"] = dump_virus(cfg.system.delta1, cfg.system.beta1);
    j["virus2"] = dump_virus(cfg.system.delta2, cfg.system.beta2);
    json init;
    json x1 = json::array(), x2 = json::array();
    for (int i = 0; i < cfg.n; ++i) {
        x1.push_back(cfg.initial.x1(i));
        x2.push_back(cfg.initial.x2(i));
    }
    init["x1"] = std::move(x1);
    init["x2"] = std::move(x2);
    j["initial"] = std::move(init);
    j["integrator"] = {{"dt", cfg.integrator.dt},
                       {"t_max", cfg.integrator.t_max},
                       {"convergence_tol", cfg.integrator.convergence_tol},
                       {"clamp_tol", cfg.integrator.clamp_tol},
                       {"record_stride", cfg.integrator.record_stride}};
    j["output"] = {{"trajectory", cfg.trajectory_file}};
    return j.dump(2) + "\n";
}

} // namespace bivirus
