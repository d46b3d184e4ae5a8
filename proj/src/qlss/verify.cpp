#include "qlss/verify.hpp"

#include "qlss/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlss {

StatePair map_back(const DualTransform& f, const StatePair& s) {
    const int n = s.size();
    StatePair uv(n);
    for (int i = 0; i < n; ++i) {
        uv.w[i] = f.value(s.w[i]);
        uv.z[i] = f.value(s.z[i]);
    }
    return uv;
}

namespace {

double mollifier(double rho) {
    if (rho >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - rho * rho));
}

// One equation's defect: T1 + T2 + T3 - T4, normalized by the term sizes.
double equation_defect(const FunctionalContext& ctx, const std::vector<double>& u,
                       const std::vector<double>& other,
                       const std::vector<double>& pot, bool first_component,
                       const std::vector<double>& test) {
    const Grid& g = ctx.grid();
    const int n = g.node_count();
    const HomogeneousQ& q = ctx.raw_q();

    double t1 = 0.0;
    for (const auto& l : g.flux_links()) {
        const double um = 0.5 * (u[l.a] + u[l.b]);
        t1 += l.w * (1.0 + 2.0 * um * um) * (u[l.a] - u[l.b]) * (test[l.a] - test[l.b]);
    }
    std::vector<double> gsq(n);
    g.gradient_sq(u, gsq);
    const auto& nu = g.node_measure();
    double t2 = 0.0, t3 = 0.0, t4 = 0.0;
    for (int i = 0; i < n; ++i) {
        t2 += nu[i] * 2.0 * gsq[i] * u[i] * test[i];
        t3 += nu[i] * pot[i] * u[i] * test[i];
        const auto qg = first_component ? q.grad(u[i], other[i])
                                        : q.grad(other[i], u[i]);
        t4 += nu[i] * (first_component ? qg.du : qg.dv) * test[i];
    }
    const double defect = std::fabs(t1 + t2 + t3 - t4);
    const double scale = std::fabs(t1) + std::fabs(t2) + std::fabs(t3) + std::fabs(t4);
    return defect / (scale + 1e-300);
}

} // namespace

WeakResidualReport weak_residual_original(const FunctionalContext& ctx,
                                          const StatePair& uv, int bank_size,
                                          std::uint64_t seed) {
    if (bank_size < 4)
        throw std::invalid_argument("weak_residual_original: bank_size too small");
    const Grid& g = ctx.grid();
    const int n = g.node_count();
    if (uv.size() != n)
        throw std::invalid_argument("weak_residual_original: state size mismatch");

    Rng rng(seed);
    WeakResidualReport rep;
    rep.bank_size = bank_size;
    const double R = g.domain_radius();
    const bool radial = dynamic_cast<const RadialGrid*>(&g) != nullptr;

    for (int b = 0; b < bank_size; ++b) {
        std::vector<double> test(n, 0.0);
        if (b >= bank_size - 2) {
            // Composite u sqrt(1 + 2u^2): the transform quotient f/f' applied
            // to the solution itself, the multiplier the analysis tests with.
            const auto& comp = (b == bank_size - 2) ? uv.w : uv.z;
            for (int i = 0; i < n; ++i)
                test[i] = g.is_boundary(i)
                              ? 0.0
                              : comp[i] * std::sqrt(1.0 + 2.0 * comp[i] * comp[i]);
        } else if (radial) {
            const double sigma = rng.uniform(0.05 * R, 0.10 * R);
            const double c = rng.uniform(0.15 * R, 0.70 * R);
            for (int i = 0; i < n; ++i)
                test[i] = mollifier(std::fabs(g.node_radius()[i] - c) / sigma);
        } else {
            const double sigma = rng.uniform(0.15 * R, 0.30 * R);
            std::array<double, 3> c{};
            for (int d = 0; d < g.dimension(); ++d) c[d] = rng.symmetric(0.4 * R);
            for (int i = 0; i < n; ++i) {
                const auto x = g.node_position(i);
                double d2 = 0.0;
                for (int d = 0; d < g.dimension(); ++d)
                    d2 += (x[d] - c[d]) * (x[d] - c[d]);
                test[i] = mollifier(std::sqrt(d2) / sigma);
            }
        }
        const double du = equation_defect(ctx, uv.w, uv.z, ctx.W(), true, test);
        const double dv = equation_defect(ctx, uv.z, uv.w, ctx.V(), false, test);
        rep.defects.push_back(std::max(du, dv));
        rep.max_defect = std::max(rep.max_defect, rep.defects.back());
    }
    return rep;
}

ConsistencyReport penalization_consistency(const FunctionalContext& ctx,
                                           const StatePair& s) {
    if (ctx.mode() != FunctionalContext::Mode::penalized)
        throw std::invalid_argument("penalization_consistency: needs a penalized context");
    const Grid& g = ctx.grid();
    if (s.size() != g.node_count())
        throw std::invalid_argument("penalization_consistency: state size mismatch");
    const PenalizedH& h = *ctx.penalized_h();
    const double region = h.omega().inradius(g.dimension()) / ctx.epsilon();
    if (region >= g.domain_radius())
        throw std::invalid_argument("penalization_consistency: confinement region "
                                    "exceeds the truncation radius");
    ConsistencyReport rep;
    rep.a = h.a();
    rep.w_threshold = ctx.transform().inverse(0.5 * h.a());
    const DualTransform& f = ctx.transform();
    const auto& inside = ctx.inside_omega();
    const int n = g.node_count();
    for (int i = 0; i < n; ++i) {
        if (inside[i]) continue;
        const double fu = f.value(s.w[i]);
        const double fv = f.value(s.z[i]);
        rep.outside_sup = std::max(rep.outside_sup, std::hypot(fu, fv));
        rep.outside_sup_wz = std::max(rep.outside_sup_wz,
                                      std::max(std::fabs(s.w[i]), std::fabs(s.z[i])));
    }
    rep.ok = rep.outside_sup < rep.a;
    rep.below_half_level = rep.outside_sup_wz < rep.w_threshold;
    return rep;
}

DecayFit decay_fit(const Grid& grid, const std::vector<double>& u, double eps,
                   double tail_fraction) {
    if (!(tail_fraction > 0.0) || !(tail_fraction < 0.5))
        throw std::invalid_argument("decay_fit: tail_fraction must lie in (0, 0.5)");
    if (u.size() != static_cast<std::size_t>(grid.node_count()))
        throw std::invalid_argument("decay_fit: field size mismatch");
    DecayFit fit;
    const double active = 0.92 * grid.domain_radius();
    fit.window_hi = active;
    fit.window_lo = (1.0 - tail_fraction) * active;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int m = 0;
    const auto& rad = grid.node_radius();
    for (int i = 0; i < grid.node_count(); ++i) {
        if (rad[i] < fit.window_lo || rad[i] > fit.window_hi) continue;
        if (!(u[i] > 1e-14)) continue;
        const double x = rad[i], y = std::log(u[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
        ++m;
    }
    if (m < 8)
        throw std::runtime_error("decay_fit: fewer than 8 usable tail nodes");
    fit.nodes_used = m;
    const double det = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / det;
    const double icept = (sy - slope * sx) / m;
    fit.C1 = std::exp(icept);
    fit.C2 = -slope * eps;
    const double ss_tot = syy - sy * sy / m;
    double ss_res = 0.0;
    for (int i = 0; i < grid.node_count(); ++i) {
        if (rad[i] < fit.window_lo || rad[i] > fit.window_hi) continue;
        if (!(u[i] > 1e-14)) continue;
        const double e = std::log(u[i]) - (icept + slope * rad[i]);
        ss_res += e * e;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return fit;
}

double ring_max(const Grid& grid, const StatePair& s, double ring_radius) {
    if (!(ring_radius > 0.0))
        throw std::invalid_argument("ring_max: radius must be positive");
    if (ring_radius > grid.domain_radius())
        throw std::invalid_argument("ring_max: ring lies outside the grid");
    const auto& rad = grid.node_radius();
    const double h = grid.mesh_width();
    double m = 0.0;
    bool hit = false;
    for (int i = 0; i < grid.node_count(); ++i) {
        if (std::fabs(rad[i] - ring_radius) > h) continue;
        hit = true;
        m = std::max(m, std::hypot(s.w[i], s.z[i]));
    }
    if (!hit)
        throw std::runtime_error("ring_max: no nodes within one mesh width of the ring");
    return m;
}

VerificationReport verify_solution(const FunctionalContext& ctx, const StatePair& s) {
    VerificationReport rep;
    const StatePair uv = map_back(ctx.transform(), s);
    double mn = 0.0, sup_u = 0.0, sup_v = 0.0;
    for (int i = 0; i < uv.size(); ++i) {
        mn = std::min({mn, uv.w[i], uv.z[i]});
        sup_u = std::max(sup_u, uv.w[i]);
        sup_v = std::max(sup_v, uv.z[i]);
    }
    rep.positivity_ok = mn >= -1e-12 * std::max(sup_u, sup_v);
    rep.nontrivial_ok = sup_u > 1e-6 && sup_v > 1e-6;
    rep.consistency = penalization_consistency(ctx, s);
    rep.weak = weak_residual_original(ctx, uv);
    // A state without a usable tail (e.g. a non-converged compact candidate)
    // fails the fit rather than aborting the whole run.
    try {
        rep.decay_u = decay_fit(ctx.grid(), uv.w, ctx.epsilon());
    } catch (const std::exception&) {
        rep.decay_u = DecayFit{};
    }
    try {
        rep.decay_v = decay_fit(ctx.grid(), uv.z, ctx.epsilon());
    } catch (const std::exception&) {
        rep.decay_v = DecayFit{};
    }
    return rep;
}

std::string VerificationReport::to_json() const {
    nlohmann::json j;
    j["ok"] = ok();
    j["positivity_ok"] = positivity_ok;
    j["nontrivial_ok"] = nontrivial_ok;
    j["consistency"] = {
        {"outside_sup", consistency.outside_sup},
        {"a", consistency.a},
        {"w_threshold", consistency.w_threshold},
        {"outside_sup_wz", consistency.outside_sup_wz},
        {"ok", consistency.ok},
        {"below_half_level", consistency.below_half_level},
    };
    j["weak_residual"] = {
        {"max_defect", weak.max_defect},
        {"bank_size", weak.bank_size},
        {"tolerance", weak_tolerance},
        {"defects", weak.defects},
    };
    auto decay = [](const DecayFit& d) {
        return nlohmann::json{{"C1", d.C1},
                              {"C2", d.C2},
                              {"r_squared", d.r_squared},
                              {"nodes_used", d.nodes_used},
                              {"window_lo", d.window_lo},
                              {"window_hi", d.window_hi}};
    };
    j["decay_u"] = decay(decay_u);
    j["decay_v"] = decay(decay_v);
    j["decay_r2_min"] = decay_r2_min;
    return j.dump(2);
}

} // namespace qlss
