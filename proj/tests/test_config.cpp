#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qlss/config.hpp"

#include <string>

using namespace qlss;

namespace {

// Minimal complete document; tests splice pieces out or override them.
const char* kBase = R"JSON({
  "grid": {"kind": "radial", "dimension": 3, "radius": 20.0, "nodes": 400},
  "potentials": {
    "W": {"kind": "constant", "value": 1.0},
    "V": {"kind": "class2_bump", "floor": 2.0}
  },
  "nonlinearity": {"p": 6.0, "mixed": [{"b": 1.0, "alpha": 3.0, "beta": 3.0}]},
  "penalization": {"omega": {"kind": "ball", "radius": 10.0}, "a": "auto"},
  "solver": {"path_nodes": 17, "grad_tolerance": 1e-8, "polish": "damped_newton"},
  "epsilon_list": [1.0, 0.5],
  "output_dir": "out/test",
  "seed": 7
})JSON";

std::string patched(const std::string& from, const std::string& to) {
    std::string s = kBase;
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    s.replace(pos, from.size(), to);
    return s;
}

} // namespace

TEST_CASE("full document round-trips into a run configuration") {
    auto c = RunConfig::from_json_text(kBase);
    CHECK(c.grid.kind == GridConfig::Kind::radial);
    CHECK(c.grid.dimension == 3);
    CHECK(c.grid.radius == 20.0);
    CHECK(c.grid.nodes == 400);
    CHECK(c.W.kind == PotentialSpec::Kind::constant);
    CHECK(c.W.floor == 1.0);
    CHECK(c.V.kind == PotentialSpec::Kind::class2_bump);
    CHECK(c.V.floor == 2.0);
    CHECK(c.p == 6.0);
    CHECK(c.pure_u == 0.0);
    CHECK(c.mixed.size() == 1);
    CHECK(c.mixed[0].alpha == 3.0);
    CHECK(c.a_auto);
    CHECK(c.omega.kind == OmegaRegion::Kind::ball);
    CHECK(c.omega.radius == 10.0);
    CHECK(c.solver.path_nodes == 17);
    CHECK(c.solver.polish == SolverConfig::Polish::damped_newton);
    CHECK(c.solver.seed == 7); // solver inherits the run seed
    CHECK(c.epsilon_list == std::vector<double>{1.0, 0.5});
    CHECK(c.output_dir == "out/test");
    CHECK(c.seed == 7);
    CHECK(c.source_text == kBase);

    auto grid = c.grid.build();
    CHECK(grid->node_count() == 400);
    auto q = c.make_q();
    CHECK(q.value(1.0, 1.0) == 1.0);
    CHECK(c.resolve_a(q) > 0.0);
}

TEST_CASE("defaults fill the optional blocks") {
    // Without the solver block everything falls back to defaults.
    auto c = RunConfig::from_json_text(patched(
        R"("solver": {"path_nodes": 17, "grad_tolerance": 1e-8, "polish": "damped_newton"},)",
        ""));
    CHECK(c.solver.path_nodes == 17);
    CHECK(c.solver.descent_step == 0.5);
    CHECK(c.solver.grad_tolerance == 1e-8);
    CHECK(c.solver.max_outer_iterations == 4000);
    CHECK(c.solver.rho == 0.3);

    auto c2 = RunConfig::from_json_text(
        patched(R"("output_dir": "out/test",)", ""));
    CHECK(c2.output_dir == "out");
}

TEST_CASE("box grid and box region variants") {
    std::string both = kBase;
    auto sub = [&](const std::string& from, const std::string& to) {
        const auto pos = both.find(from);
        REQUIRE(pos != std::string::npos);
        both.replace(pos, from.size(), to);
    };
    sub(R"({"kind": "radial", "dimension": 3, "radius": 20.0, "nodes": 400})",
        R"({"kind": "box", "dimension": 3, "half_width": 6.0, "points_per_axis": 32})");
    sub(R"({"kind": "ball", "radius": 10.0})",
        R"({"kind": "box", "half_widths": [2.0, 3.0]})");
    auto c = RunConfig::from_json_text(both);
    CHECK(c.grid.kind == GridConfig::Kind::box);
    CHECK(c.grid.radius == 6.0);
    CHECK(c.grid.nodes == 32);
    CHECK(c.omega.kind == OmegaRegion::Kind::box);
    CHECK(c.omega.half_widths[0] == 2.0);
    CHECK(c.omega.half_widths[1] == 3.0);
    CHECK(c.omega.half_widths[2] == 3.0); // trailing entries repeat the last
    CHECK(c.grid.build()->node_count() == 32 * 32 * 32);
}

TEST_CASE("explicit plateau threshold") {
    auto c = RunConfig::from_json_text(patched(R"("a": "auto")", R"("a": 0.03)"));
    CHECK_FALSE(c.a_auto);
    CHECK(c.a_explicit == 0.03);
    CHECK(c.resolve_a(c.make_q()) == 0.03);

    auto bad = RunConfig::from_json_text(patched(R"("a": "auto")", R"("a": -0.5)"));
    CHECK_THROWS_AS(bad.resolve_a(bad.make_q()), config_error);
}

TEST_CASE("table potentials parse into interpolants") {
    auto c = RunConfig::from_json_text(
        patched(R"({"kind": "constant", "value": 1.0})",
                R"({"kind": "table", "rows": [[0.0, 2.0], [1.0, 3.0], [4.0, 3.5]]})"));
    CHECK(c.W.kind == PotentialSpec::Kind::table);
    CHECK(c.W.value(0.0) == 2.0);
    CHECK(c.W.value(0.5) == doctest::Approx(2.5));
    CHECK(c.W.value(10.0) == 3.5); // clamped past the last row
    CHECK(c.W.floor == 2.0);
    CHECK(c.W.ceiling == 3.5);
}

TEST_CASE("malformed documents raise configuration errors with context") {
    CHECK_THROWS_AS(RunConfig::from_json_text("{nope"), config_error);
    CHECK_THROWS_WITH_AS(RunConfig::from_json_text("{}"),
                         doctest::Contains("missing key 'grid'"), config_error);
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(patched(R"("kind": "radial")", R"("kind": "hex")")),
        doctest::Contains("grid"), config_error);
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(patched(R"("radius": 20.0,)", "")),
        doctest::Contains("radius"), config_error);
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(patched(R"({"kind": "constant", "value": 1.0})", "3")),
        doctest::Contains("potentials.W"), config_error);
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(patched(R"("a": "auto")", R"("a": "pick")")),
        doctest::Contains("auto"), config_error);
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(patched(R"("polish": "damped_newton")",
                                          R"("polish": "buff")")),
        doctest::Contains("polish"), config_error);
}

TEST_CASE("epsilon ladder validation") {
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(patched(R"([1.0, 0.5])", "[]")),
        doctest::Contains("epsilon_list"), config_error);
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(patched(R"([1.0, 0.5])", "[1.5]")),
        doctest::Contains("(0, 1]"), config_error);
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(patched(R"([1.0, 0.5])", "[0.0]")),
        doctest::Contains("(0, 1]"), config_error);
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(patched(R"([1.0, 0.5])", "[0.5, 1.0]")),
        doctest::Contains("decreasing"), config_error);
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(patched(R"([1.0, 0.5])", "[0.5, 0.5]")),
        doctest::Contains("decreasing"), config_error);
}

TEST_CASE("solver settings are validated at parse time") {
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(patched(R"("path_nodes": 17)", R"("path_nodes": 16)")),
        doctest::Contains("solver"), config_error);
    CHECK_THROWS_WITH_AS(
        RunConfig::from_json_text(
            patched(R"("grad_tolerance": 1e-8)", R"("grad_tolerance": 0.0)")),
        doctest::Contains("solver"), config_error);
}

TEST_CASE("missing files are reported as configuration errors") {
    CHECK_THROWS_WITH_AS(RunConfig::from_file("/nonexistent/path.json"),
                         doctest::Contains("cannot open"), config_error);
}
