#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qlss.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const char* kConfig = R"JSON({
  "grid": {"kind": "radial", "dimension": 3, "radius": 20.0, "nodes": 400},
  "potentials": {
    "W": {"kind": "constant", "value": 1.0},
    "V": {"kind": "constant", "value": 1.0}
  },
  "nonlinearity": {"p": 6.0, "mixed": [{"b": 1.0, "alpha": 3.0, "beta": 3.0}]},
  "penalization": {"omega": {"kind": "ball", "radius": 10.0}, "a": "auto"},
  "epsilon_list": [1.0],
  "output_dir": "out/capi",
  "seed": 42
})JSON";

struct Config {
    qlss_config* h = nullptr;
    ~Config() { qlss_config_free(h); }
};

struct Report {
    qlss_report* h = nullptr;
    ~Report() { qlss_report_free(h); }
};

} // namespace

TEST_CASE("version and status names are stable strings") {
    REQUIRE(qlss_version() != nullptr);
    CHECK(std::string(qlss_version()).find('.') != std::string::npos);
    CHECK(std::string(qlss_status_name(QLSS_OK)) == "QLSS_OK");
    CHECK(std::string(qlss_status_name(QLSS_ERR_PARSE)) == "QLSS_ERR_PARSE");
    CHECK(std::string(qlss_status_name(QLSS_ERR_GEOMETRY)) == "QLSS_ERR_GEOMETRY");
    CHECK(qlss_status_name(static_cast<qlss_status>(99)) != nullptr);
}

TEST_CASE("parse accepts the benchmark document and rejects junk") {
    Config c;
    CHECK(qlss_config_parse(kConfig, &c.h) == QLSS_OK);
    REQUIRE(c.h != nullptr);

    qlss_config* bad = nullptr;
    CHECK(qlss_config_parse("{not json", &bad) == QLSS_ERR_PARSE);
    CHECK(bad == nullptr);
    CHECK(std::strlen(qlss_last_error()) > 0);

    CHECK(qlss_config_parse("{}", &bad) == QLSS_ERR_PARSE);
    CHECK(std::string(qlss_last_error()).find("grid") != std::string::npos);

    CHECK(qlss_config_parse(nullptr, &bad) == QLSS_ERR_INVALID_ARGUMENT);
    CHECK(qlss_config_parse(kConfig, nullptr) == QLSS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("load reports missing files as io errors") {
    qlss_config* h = nullptr;
    CHECK(qlss_config_load("/nonexistent/qlss.json", &h) == QLSS_ERR_PARSE);
    CHECK(h == nullptr);
}

TEST_CASE("epsilon override validates its range") {
    Config c;
    REQUIRE(qlss_config_parse(kConfig, &c.h) == QLSS_OK);
    CHECK(qlss_config_set_epsilon(c.h, 0.5) == QLSS_OK);
    CHECK(qlss_config_set_epsilon(c.h, 0.0) == QLSS_ERR_INVALID_ARGUMENT);
    CHECK(qlss_config_set_epsilon(c.h, 1.5) == QLSS_ERR_INVALID_ARGUMENT);
    CHECK(qlss_config_set_epsilon(nullptr, 0.5) == QLSS_ERR_INVALID_ARGUMENT);
    CHECK(qlss_config_set_output_dir(c.h, nullptr) == QLSS_ERR_INVALID_ARGUMENT);
    CHECK(qlss_config_set_output_dir(c.h, "out/elsewhere") == QLSS_OK);
}

TEST_CASE("preflight runs the checks and reports a verdict") {
    Config c;
    REQUIRE(qlss_config_parse(kConfig, &c.h) == QLSS_OK);
    Report r;
    CHECK(qlss_preflight(c.h, &r.h) == QLSS_OK);
    REQUIRE(r.h != nullptr);
    CHECK(qlss_report_ok(r.h) == 1);
    const char* json = qlss_report_json(r.h);
    REQUIRE(json != nullptr);
    CHECK(std::string(json).find("\"ok\"") != std::string::npos);

    CHECK(qlss_preflight(nullptr, &r.h) == QLSS_ERR_INVALID_ARGUMENT);
    CHECK(qlss_preflight(c.h, nullptr) == QLSS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("preflight flags an infeasible setup without failing the call") {
    // Region larger than the truncated domain: a hard precondition.
    std::string text = kConfig;
    const auto pos = text.find("\"radius\": 10.0");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 14, "\"radius\": 30.0");
    Config c;
    REQUIRE(qlss_config_parse(text.c_str(), &c.h) == QLSS_OK);
    Report r;
    CHECK(qlss_preflight(c.h, &r.h) == QLSS_OK);
    REQUIRE(r.h != nullptr);
    CHECK(qlss_report_ok(r.h) == 0);
    CHECK(std::string(qlss_report_json(r.h)).find("errors") != std::string::npos);
}

TEST_CASE("transform evaluation with optional outputs") {
    double f = 0.0, fp = 0.0, fpp = 0.0;
    CHECK(qlss_transform_eval(1.0, &f, &fp, &fpp) == QLSS_OK);
    CHECK(f == doctest::Approx(0.83442474148327925).epsilon(1e-12));
    CHECK(fp == doctest::Approx(1.0 / std::sqrt(1.0 + 2.0 * f * f)).epsilon(1e-12));
    CHECK(fpp < 0.0);

    CHECK(qlss_transform_eval(2.0, &f, nullptr, nullptr) == QLSS_OK);
    CHECK(f == doctest::Approx(1.37279081213772653).epsilon(1e-12));
    CHECK(qlss_transform_eval(0.0, nullptr, &fp, nullptr) == QLSS_OK);
    CHECK(fp == 1.0);

    const double inf = std::numeric_limits<double>::infinity();
    CHECK(qlss_transform_eval(inf, &f, nullptr, nullptr) ==
          QLSS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("transform table lands in a file with the expected shape") {
    const char* path = "capi_table.csv";
    std::remove(path);
    CHECK(qlss_transform_table(0.0, 1.0, 0.25, path) == QLSS_OK);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,f,f_prime,f_second");
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 5); // 0, 0.25, 0.5, 0.75, 1.0
    std::remove(path);

    CHECK(qlss_transform_table(1.0, 0.0, 0.25, path) == QLSS_ERR_INVALID_ARGUMENT);
    CHECK(qlss_transform_table(0.0, 1.0, -0.1, path) == QLSS_ERR_INVALID_ARGUMENT);
    CHECK(qlss_transform_table(0.0, 1.0, 0.25, "/nonexistent/dir/t.csv") ==
          QLSS_ERR_IO);
}

TEST_CASE("solve produces a verified report through the C surface") {
    Config c;
    REQUIRE(qlss_config_parse(kConfig, &c.h) == QLSS_OK);
    REQUIRE(qlss_config_set_output_dir(c.h, "out/capi_solve") == QLSS_OK);
    Report r;
    CHECK(qlss_solve(c.h, &r.h) == QLSS_OK);
    REQUIRE(r.h != nullptr);
    CHECK(qlss_report_ok(r.h) == 1);
    std::string json = qlss_report_json(r.h);
    CHECK(json.find("\"converged\": true") != std::string::npos);
    // Artifacts land in the requested directory.
    CHECK(std::ifstream("out/capi_solve/solution_eps1.csv").good());
    CHECK(std::ifstream("out/capi_solve/manifest.txt").good());
    CHECK(std::ifstream("out/capi_solve/trace_eps1.csv").good());
}
