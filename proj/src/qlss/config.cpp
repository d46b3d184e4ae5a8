#include "qlss/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace qlss {

std::unique_ptr<Grid> GridConfig::build() const {
    if (kind == Kind::radial)
        return std::make_unique<RadialGrid>(dimension, radius, nodes);
    return std::make_unique<BoxGrid>(dimension, radius, nodes);
}

HomogeneousQ RunConfig::make_q() const {
    return HomogeneousQ(p, pure_u, pure_v, mixed, grid.dimension);
}

double RunConfig::resolve_a(const HomogeneousQ& q) const {
    if (a_auto) return choose_a(q, W.floor, V.floor);
    if (!(a_explicit > 0.0) || !std::isfinite(a_explicit))
        throw config_error("penalization.a must be positive");
    return a_explicit;
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw config_error("config: " + where + ": " + what);
}

const json& need(const json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing key '") + key + "'");
    return *it;
}

double need_num(const json& j, const char* key, const char* where) {
    const json& v = need(j, key, where);
    if (!v.is_number()) fail(where, std::string("'") + key + "' must be a number");
    return v.get<double>();
}

PotentialSpec parse_potential(const json& j, const char* where) {
    if (!j.is_object()) fail(where, "must be an object");
    const std::string kind = need(j, "kind", where).get<std::string>();
    if (kind == "constant")
        return PotentialSpec::constant(need_num(j, "value", where));
    if (kind == "class2_bump")
        return PotentialSpec::class2_bump(need_num(j, "floor", where));
    if (kind == "table") {
        const json& rows = need(j, "rows", where);
        if (!rows.is_array()) fail(where, "'rows' must be an array of [r, v] pairs");
        std::vector<std::pair<double, double>> table;
        for (const auto& row : rows) {
            if (!row.is_array() || row.size() != 2) fail(where, "row must be [r, v]");
            table.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
        return PotentialSpec::from_table(std::move(table));
    }
    fail(where, "unknown kind '" + kind + "'");
}

} // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config: invalid JSON: ") + e.what());
    }
    RunConfig c;
    c.source_text = text;
    try {
        const json& jg = need(j, "grid", "grid");
        const std::string gkind = need(jg, "kind", "grid").get<std::string>();
        if (gkind == "radial") c.grid.kind = GridConfig::Kind::radial;
        else if (gkind == "box") c.grid.kind = GridConfig::Kind::box;
        else fail("grid", "kind must be 'radial' or 'box'");
        c.grid.dimension = static_cast<int>(need_num(jg, "dimension", "grid"));
        c.grid.radius = need_num(jg, gkind == "radial" ? "radius" : "half_width", "grid");
        c.grid.nodes = static_cast<int>(
            need_num(jg, gkind == "radial" ? "nodes" : "points_per_axis", "grid"));

        const json& jp = need(j, "potentials", "potentials");
        c.W = parse_potential(need(jp, "W", "potentials"), "potentials.W");
        c.V = parse_potential(need(jp, "V", "potentials"), "potentials.V");

        const json& jq = need(j, "nonlinearity", "nonlinearity");
        c.p = need_num(jq, "p", "nonlinearity");
        c.pure_u = jq.value("a", 0.0);
        c.pure_v = jq.value("c", 0.0);
        c.mixed.clear();
        if (jq.contains("mixed")) {
            for (const auto& m : jq.at("mixed"))
                c.mixed.push_back({need_num(m, "b", "nonlinearity.mixed"),
                                   need_num(m, "alpha", "nonlinearity.mixed"),
                                   need_num(m, "beta", "nonlinearity.mixed")});
        }

        const json& jpen = need(j, "penalization", "penalization");
        const json& jo = need(jpen, "omega", "penalization");
        const std::string okind = need(jo, "kind", "penalization.omega").get<std::string>();
        if (okind == "ball") {
            c.omega = OmegaRegion::ball(need_num(jo, "radius", "penalization.omega"));
        } else if (okind == "box") {
            const json& hw = need(jo, "half_widths", "penalization.omega");
            if (!hw.is_array() || hw.empty() || hw.size() > 3)
                fail("penalization.omega", "half_widths must hold 1..3 numbers");
            std::array<double, 3> w{1.0, 1.0, 1.0};
            for (std::size_t d = 0; d < hw.size(); ++d) w[d] = hw[d].get<double>();
            for (std::size_t d = hw.size(); d < 3; ++d) w[d] = w[hw.size() - 1];
            c.omega = OmegaRegion::box(w);
        } else {
            fail("penalization.omega", "kind must be 'ball' or 'box'");
        }
        const json& ja = need(jpen, "a", "penalization");
        if (ja.is_string()) {
            if (ja.get<std::string>() != "auto")
                fail("penalization", "a must be a number or \"auto\"");
            c.a_auto = true;
        } else if (ja.is_number()) {
            c.a_auto = false;
            c.a_explicit = ja.get<double>();
        } else {
            fail("penalization", "a must be a number or \"auto\"");
        }

        if (j.contains("solver")) {
            const json& js = j.at("solver");
            c.solver.path_nodes = static_cast<int>(js.value("path_nodes", 17.0));
            c.solver.descent_step = js.value("descent_step", 0.5);
            c.solver.grad_tolerance = js.value("grad_tolerance", 1e-8);
            c.solver.max_outer_iterations =
                static_cast<int>(js.value("max_outer_iterations", 4000.0));
            const std::string polish = js.value("polish", std::string("damped_newton"));
            if (polish == "none") c.solver.polish = SolverConfig::Polish::none;
            else if (polish == "damped_newton")
                c.solver.polish = SolverConfig::Polish::damped_newton;
            else if (polish == "nonlinear_cg")
                c.solver.polish = SolverConfig::Polish::nonlinear_cg;
            else fail("solver", "polish must be none|damped_newton|nonlinear_cg");
            c.solver.rho = js.value("rho", 0.3);
        }

        const json& je = need(j, "epsilon_list", "epsilon_list");
        if (!je.is_array() || je.empty()) fail("epsilon_list", "must be a non-empty array");
        c.epsilon_list.clear();
        for (const auto& e : je) c.epsilon_list.push_back(e.get<double>());
        for (std::size_t i = 0; i < c.epsilon_list.size(); ++i) {
            const double e = c.epsilon_list[i];
            if (!(e > 0.0) || e > 1.0) fail("epsilon_list", "entries must lie in (0, 1]");
            if (i > 0 && !(e < c.epsilon_list[i - 1]))
                fail("epsilon_list", "entries must be strictly decreasing");
        }

        c.output_dir = j.value("output_dir", std::string("out"));
        c.seed = j.value("seed", 42ULL);
        c.solver.seed = c.seed;
        try {
            c.solver.validate();
        } catch (const std::invalid_argument& e) {
            fail("solver", e.what());
        }
    } catch (const json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

} // namespace qlss
