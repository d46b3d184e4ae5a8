// Command-line front end.  Talks to the solver exclusively through the C API
// so it exercises the same surface a foreign-language binding would.
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qlss.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotOk = 1;      // ran, but a reported check failed
constexpr int kExitUsage = 2;      // bad config or bad invocation
constexpr int kExitPrecondition = 3;

int exit_code_for(qlss_status status, const qlss_report* rep) {
    switch (status) {
        case QLSS_OK:
            return qlss_report_ok(rep) ? kExitOk : kExitNotOk;
        case QLSS_ERR_PARSE:
        case QLSS_ERR_INVALID_ARGUMENT:
            return kExitUsage;
        case QLSS_ERR_PRECONDITION:
            return kExitPrecondition;
        default:
            return kExitNotOk;
    }
}

struct ConfigHandle {
    qlss_config* cfg = nullptr;
    ~ConfigHandle() { qlss_config_free(cfg); }
};

struct ReportHandle {
    qlss_report* rep = nullptr;
    ~ReportHandle() { qlss_report_free(rep); }
};

int load_config(const std::string& path, ConfigHandle& handle) {
    const qlss_status st = qlss_config_load(path.c_str(), &handle.cfg);
    if (st != QLSS_OK) {
        std::fprintf(stderr, "error (%s): %s\n", qlss_status_name(st),
                     qlss_last_error());
        return exit_code_for(st, nullptr);
    }
    return kExitOk;
}

int finish(qlss_status status, const ReportHandle& report) {
    if (status != QLSS_OK) {
        std::fprintf(stderr, "error (%s): %s\n", qlss_status_name(status),
                     qlss_last_error());
    } else {
        std::printf("%s\n", qlss_report_json(report.rep));
    }
    return exit_code_for(status, report.rep);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-volume mountain-pass solver for a coupled quasilinear "
                 "Schrodinger system"};
    app.set_version_flag("--version", std::string(qlss_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::optional<double> epsilon;
    std::optional<std::string> out_dir;

    auto* preflight = app.add_subcommand(
        "preflight", "Check a configuration for feasibility without solving");
    preflight->add_option("config", config_path, "JSON configuration file")
        ->required();

    auto* solve = app.add_subcommand(
        "solve", "Solve the system for each configured epsilon");
    solve->add_option("config", config_path, "JSON configuration file")->required();
    solve->add_option("--epsilon", epsilon,
                      "Solve this single epsilon instead of the configured list");
    solve->add_option("--out", out_dir, "Override the output directory");

    auto* sweep = app.add_subcommand(
        "sweep", "Solve the whole epsilon ladder and report concentration trends");
    sweep->add_option("config", config_path, "JSON configuration file")->required();
    sweep->add_option("--out", out_dir, "Override the output directory");

    double t_min = 0.0, t_max = 0.0, t_step = 0.0;
    std::optional<std::string> table_out;
    auto* table = app.add_subcommand(
        "transform-table", "Tabulate the dual transform and its derivatives");
    table->add_option("--min", t_min, "Smallest argument")->required();
    table->add_option("--max", t_max, "Largest argument")->required();
    table->add_option("--step", t_step, "Argument increment")->required();
    table->add_option("--out", table_out, "CSV path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (table->parsed()) {
        const qlss_status st = qlss_transform_table(
            t_min, t_max, t_step, table_out ? table_out->c_str() : nullptr);
        if (st != QLSS_OK) {
            std::fprintf(stderr, "error (%s): %s\n", qlss_status_name(st),
                         qlss_last_error());
            return exit_code_for(st, nullptr);
        }
        return kExitOk;
    }

    ConfigHandle cfg;
    if (const int rc = load_config(config_path, cfg); rc != kExitOk) return rc;

    if (epsilon) {
        const qlss_status st = qlss_config_set_epsilon(cfg.cfg, *epsilon);
        if (st != QLSS_OK) {
            std::fprintf(stderr, "error (%s): %s\n", qlss_status_name(st),
                         qlss_last_error());
            return kExitUsage;
        }
    }
    if (out_dir) {
        const qlss_status st = qlss_config_set_output_dir(cfg.cfg, out_dir->c_str());
        if (st != QLSS_OK) return kExitUsage;
    }

    ReportHandle rep;
    qlss_status st = QLSS_OK;
    if (preflight->parsed()) {
        st = qlss_preflight(cfg.cfg, &rep.rep);
        if (st == QLSS_OK && !qlss_report_ok(rep.rep)) {
            std::printf("%s\n", qlss_report_json(rep.rep));
            return kExitPrecondition;
        }
    } else if (solve->parsed()) {
        st = qlss_solve(cfg.cfg, &rep.rep);
    } else if (sweep->parsed()) {
        st = qlss_sweep(cfg.cfg, &rep.rep);
    }
    return finish(st, rep);
}
