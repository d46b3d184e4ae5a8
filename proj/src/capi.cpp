#include "qlss.h"

#include <cstring>
#include <string>

#include "qlss/config.hpp"
#include "qlss/dual_transform.hpp"
#include "qlss/mountain_pass.hpp"
#include "qlss/runner.hpp"

struct qlss_config {
    qlss::RunConfig cfg;
};

struct qlss_report {
    bool ok = false;
    std::string json;
};

namespace {

thread_local std::string g_last_error;

qlss_status set_error(qlss_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

// Runs fn inside a catch-all that maps exception types onto status codes.
template <typename Fn>
qlss_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const qlss::config_error& e) {
        return set_error(QLSS_ERR_PARSE, e.what());
    } catch (const qlss::precondition_error& e) {
        return set_error(QLSS_ERR_PRECONDITION, e.what());
    } catch (const qlss::geometry_error& e) {
        return set_error(QLSS_ERR_GEOMETRY, e.what());
    } catch (const std::invalid_argument& e) {
        return set_error(QLSS_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::domain_error& e) {
        return set_error(QLSS_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        const char* what = e.what();
        if (std::strncmp(what, "io:", 3) == 0) return set_error(QLSS_ERR_IO, what);
        return set_error(QLSS_ERR_INTERNAL, what);
    } catch (...) {
        return set_error(QLSS_ERR_INTERNAL, "unknown failure");
    }
}

qlss_report* make_report(bool ok, std::string json) {
    auto* rep = new qlss_report;
    rep->ok = ok;
    rep->json = std::move(json);
    return rep;
}

} // namespace

extern "C" {

const char* qlss_version(void) { return qlss::kVersion; }

const char* qlss_status_name(qlss_status status) {
    switch (status) {
        case QLSS_OK: return "QLSS_OK";
        case QLSS_ERR_INVALID_ARGUMENT: return "QLSS_ERR_INVALID_ARGUMENT";
        case QLSS_ERR_PARSE: return "QLSS_ERR_PARSE";
        case QLSS_ERR_PRECONDITION: return "QLSS_ERR_PRECONDITION";
        case QLSS_ERR_IO: return "QLSS_ERR_IO";
        case QLSS_ERR_GEOMETRY: return "QLSS_ERR_GEOMETRY";
        case QLSS_ERR_INTERNAL: return "QLSS_ERR_INTERNAL";
    }
    return "QLSS_ERR_UNKNOWN";
}

const char* qlss_last_error(void) { return g_last_error.c_str(); }

qlss_status qlss_config_parse(const char* json_text, qlss_config** out) {
    if (json_text == nullptr || out == nullptr)
        return set_error(QLSS_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto* handle = new qlss_config{qlss::RunConfig::from_json_text(json_text)};
        *out = handle;
        return QLSS_OK;
    });
}

qlss_status qlss_config_load(const char* path, qlss_config** out) {
    if (path == nullptr || out == nullptr)
        return set_error(QLSS_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto* handle = new qlss_config{qlss::RunConfig::from_file(path)};
        *out = handle;
        return QLSS_OK;
    });
}

qlss_status qlss_config_set_epsilon(qlss_config* cfg, double eps) {
    if (cfg == nullptr) return set_error(QLSS_ERR_INVALID_ARGUMENT, "null config");
    if (!(eps > 0.0) || eps > 1.0)
        return set_error(QLSS_ERR_INVALID_ARGUMENT, "epsilon must lie in (0, 1]");
    cfg->cfg.epsilon_list = {eps};
    return QLSS_OK;
}

qlss_status qlss_config_set_output_dir(qlss_config* cfg, const char* dir) {
    if (cfg == nullptr || dir == nullptr)
        return set_error(QLSS_ERR_INVALID_ARGUMENT, "null argument");
    cfg->cfg.output_dir = dir;
    return QLSS_OK;
}

void qlss_config_free(qlss_config* cfg) { delete cfg; }

qlss_status qlss_preflight(const qlss_config* cfg, qlss_report** out) {
    if (cfg == nullptr || out == nullptr)
        return set_error(QLSS_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        qlss::PreflightOutcome pf = qlss::preflight(cfg->cfg);
        *out = make_report(pf.ok, pf.report.dump(2));
        return QLSS_OK;
    });
}

qlss_status qlss_solve(const qlss_config* cfg, qlss_report** out) {
    if (cfg == nullptr || out == nullptr)
        return set_error(QLSS_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        qlss::SolveOutcome res = qlss::run_solve(cfg->cfg, {}, {});
        *out = make_report(res.ok, res.report.dump(2));
        return QLSS_OK;
    });
}

qlss_status qlss_sweep(const qlss_config* cfg, qlss_report** out) {
    if (cfg == nullptr || out == nullptr)
        return set_error(QLSS_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        qlss::SolveOutcome res = qlss::run_sweep(cfg->cfg, {});
        *out = make_report(res.ok, res.report.dump(2));
        return QLSS_OK;
    });
}

int qlss_report_ok(const qlss_report* rep) {
    return rep != nullptr && rep->ok ? 1 : 0;
}

const char* qlss_report_json(const qlss_report* rep) {
    return rep != nullptr ? rep->json.c_str() : "";
}

void qlss_report_free(qlss_report* rep) { delete rep; }

qlss_status qlss_transform_eval(double t, double* f, double* f_prime,
                                double* f_second) {
    return guarded([&] {
        static const qlss::DualTransform F;
        const double y = F.value(t);
        if (f != nullptr) *f = y;
        if (f_prime != nullptr) *f_prime = qlss::DualTransform::derivative_from_value(y);
        if (f_second != nullptr)
            *f_second = qlss::DualTransform::second_derivative_from_value(y);
        return QLSS_OK;
    });
}

qlss_status qlss_transform_table(double t_min, double t_max, double t_step,
                                 const char* path) {
    return guarded([&] {
        qlss::write_transform_table(t_min, t_max, t_step,
                                    path == nullptr ? std::string() : path);
        return QLSS_OK;
    });
}

} // extern "C"
