#include "qlss/nonlinearity.hpp"

#include "qlss/rng.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qlss {

namespace {
bool is_one(double x) { return std::fabs(x - 1.0) <= 1e-12; }
} // namespace

double HomogeneousQ::max_exponent(int dimension) {
    if (dimension <= 2) return std::numeric_limits<double>::infinity();
    return 4.0 * dimension / (dimension - 2.0); // 2 * critical Sobolev exponent
}

HomogeneousQ::HomogeneousQ(double p, double pure_u_coeff, double pure_v_coeff,
                           std::vector<MixedTerm> mixed, int dimension)
    : p_(p), a_(pure_u_coeff), c_(pure_v_coeff), mixed_(std::move(mixed)),
      dim_(dimension) {
    if (dim_ < 2)
        throw std::invalid_argument("HomogeneousQ: dimension must be >= 2");
    if (!std::isfinite(p_) || !(p_ > 4.0) || !(p_ < max_exponent(dim_)))
        throw std::invalid_argument(
            "HomogeneousQ: homogeneity degree must lie in (4, 4N/(N-2))");
    if (!std::isfinite(a_) || !std::isfinite(c_))
        throw std::invalid_argument("HomogeneousQ: non-finite coefficient");
    bool any_nonzero = a_ != 0.0 || c_ != 0.0;
    for (const auto& m : mixed_) {
        if (!std::isfinite(m.b) || !std::isfinite(m.alpha) || !std::isfinite(m.beta))
            throw std::invalid_argument("HomogeneousQ: non-finite mixed term");
        if (!(m.alpha >= 1.0) || !(m.beta >= 1.0))
            throw std::invalid_argument(
                "HomogeneousQ: mixed exponents must both be >= 1");
        if (std::fabs(m.alpha + m.beta - p_) > 1e-9)
            throw std::invalid_argument(
                "HomogeneousQ: mixed exponents must sum to the degree");
        any_nonzero = any_nonzero || m.b != 0.0;
    }
    if (!any_nonzero)
        throw std::invalid_argument("HomogeneousQ: all coefficients are zero");
}

double HomogeneousQ::value(double u, double v) const {
    if (!(u > 0.0) || !(v > 0.0)) return 0.0;
    double s = 0.0;
    if (a_ != 0.0) s += a_ * std::pow(u, p_);
    for (const auto& m : mixed_)
        s += m.b * std::pow(u, m.alpha) * std::pow(v, m.beta);
    if (c_ != 0.0) s += c_ * std::pow(v, p_);
    return s;
}

HomogeneousQ::Grad HomogeneousQ::grad(double u, double v) const {
    if (!(u > 0.0) || !(v > 0.0)) return {0.0, 0.0};
    double du = 0.0, dv = 0.0;
    if (a_ != 0.0) du += a_ * p_ * std::pow(u, p_ - 1.0);
    if (c_ != 0.0) dv += c_ * p_ * std::pow(v, p_ - 1.0);
    for (const auto& m : mixed_) {
        const double pu = std::pow(u, m.alpha - 1.0);
        const double pv = std::pow(v, m.beta - 1.0);
        du += m.b * m.alpha * pu * (pv * v);
        dv += m.b * m.beta * (pu * u) * pv;
    }
    return {du, dv};
}

HomogeneousQ::Hess HomogeneousQ::hessian(double u, double v) const {
    if (!(u > 0.0) || !(v > 0.0)) return {0.0, 0.0, 0.0};
    double duu = 0.0, duv = 0.0, dvv = 0.0;
    if (a_ != 0.0) duu += a_ * p_ * (p_ - 1.0) * std::pow(u, p_ - 2.0);
    if (c_ != 0.0) dvv += c_ * p_ * (p_ - 1.0) * std::pow(v, p_ - 2.0);
    for (const auto& m : mixed_) {
        const double pu = std::pow(u, m.alpha - 1.0);
        const double pv = std::pow(v, m.beta - 1.0);
        const double cuu = m.b * m.alpha * (m.alpha - 1.0);
        const double cvv = m.b * m.beta * (m.beta - 1.0);
        if (cuu != 0.0) duu += cuu * (pu / u) * (pv * v);
        if (cvv != 0.0) dvv += cvv * (pu * u) * (pv / v);
        duv += m.b * m.alpha * m.beta * pu * pv;
    }
    return {duu, duv, dvv};
}

HomogeneousQ::Grad HomogeneousQ::grad_limit_on_v_axis() const {
    double du = 0.0;
    for (const auto& m : mixed_)
        if (is_one(m.alpha)) du += m.b; // u^{alpha-1} v^{beta} -> 1 at (0,1)
    return {du, c_ * p_};
}

HomogeneousQ::Grad HomogeneousQ::grad_limit_on_u_axis() const {
    double dv = 0.0;
    for (const auto& m : mixed_)
        if (is_one(m.beta)) dv += m.b;
    return {a_ * p_, dv};
}

HypothesisReport check_hypotheses(const HomogeneousQ& q, int sample_count,
                                  std::uint64_t seed) {
    if (sample_count < 16)
        throw std::invalid_argument("check_hypotheses: sample_count too small");
    HypothesisReport rep;
    rep.continuity_warning = q.continuity_warning();
    if (rep.continuity_warning)
        rep.notes.push_back("pure-power coefficient nonzero: the zero extension "
                            "off the quadrant is discontinuous");

    const double p = q.p();
    Rng rng(seed);

    // (Q0) exponent window plus sampled homogeneity Q(tu,tv) = t^p Q(u,v).
    bool homog_ok = p > 4.0 && p < HomogeneousQ::max_exponent(q.dimension());
    double homog_max = 0.0;
    for (int i = 0; i < sample_count; ++i) {
        const double u = rng.uniform(1e-3, 3.0);
        const double v = rng.uniform(1e-3, 3.0);
        const double t = rng.uniform(1e-2, 1e3);
        const double lhs = q.value(t * u, t * v);
        const double rhs = std::pow(t, p) * q.value(u, v);
        const double rel = std::fabs(lhs - rhs) /
                           (std::fabs(rhs) + std::numeric_limits<double>::min());
        homog_max = std::max(homog_max, rel);
    }
    if (homog_max > 1e-10) homog_ok = false;
    rep.q0_homogeneity = homog_ok;
    if (!homog_ok) rep.notes.push_back("homogeneity window or scaling identity failed");

    // Angular sweep of the quadrant: growth constant, positivity, monotonicity.
    const int n_ang = 4096;
    double growth = 0.0, q_min = std::numeric_limits<double>::infinity();
    double grad_min = std::numeric_limits<double>::infinity();
    for (int k = 1; k < n_ang; ++k) {
        const double phi = (3.14159265358979323846 / 2.0) * k / n_ang;
        const double cu = std::cos(phi), sv = std::sin(phi);
        const auto g = q.grad(cu, sv);
        const double denom = std::pow(cu, p - 1.0) + std::pow(sv, p - 1.0);
        growth = std::max(growth, (std::fabs(g.du) + std::fabs(g.dv)) / denom);
        q_min = std::min(q_min, q.value(cu, sv));
        grad_min = std::min(grad_min, std::min(g.du, g.dv));
    }
    rep.growth_constant = growth;
    rep.q1_growth = std::isfinite(growth);
    rep.q4_positive = q_min > 0.0;
    if (!rep.q4_positive) rep.notes.push_back("Q is not positive inside the quadrant");

    // Sampled growth bound and Euler identity p Q = u Q_u + v Q_v.
    double euler_max = 0.0;
    bool growth_violation = false, grad_negative = grad_min < -1e-12;
    for (int i = 0; i < sample_count; ++i) {
        const double u = rng.uniform(1e-6, 10.0);
        const double v = rng.uniform(1e-6, 10.0);
        const auto g = q.grad(u, v);
        const double val = q.value(u, v);
        const double euler = std::fabs(p * val - u * g.du - v * g.dv) /
                             (std::fabs(p * val) + 1e-300);
        euler_max = std::max(euler_max, euler);
        const double bound = growth * (std::pow(u, p - 1.0) + std::pow(v, p - 1.0));
        if (std::fabs(g.du) + std::fabs(g.dv) > bound * (1.0 + 1e-9) + 1e-300)
            growth_violation = true;
        if (g.du < -1e-12 || g.dv < -1e-12) grad_negative = true;
    }
    rep.euler_max_rel = euler_max;
    if (growth_violation) {
        rep.q1_growth = false;
        rep.notes.push_back("sampled gradient exceeded the angular growth constant");
    }
    rep.q5_monotone = !grad_negative;
    if (grad_negative) rep.notes.push_back("a partial derivative is negative on the quadrant");

    // Axis conditions from the term-wise limits.
    const auto lv = q.grad_limit_on_v_axis();
    const auto lu = q.grad_limit_on_u_axis();
    rep.q2_axis_u = lv.du == 0.0 && lu.dv == 0.0;
    if (!rep.q2_axis_u)
        rep.notes.push_back("a mixed term with unit exponent leaves a nonzero "
                            "cross-derivative on an axis");
    rep.q3_axis_v = lu.du == 0.0 && lv.dv == 0.0;
    if (!rep.q3_axis_v)
        rep.notes.push_back("pure-power term: the own-variable derivative does not "
                            "vanish on its axis");
    return rep;
}

std::string HypothesisReport::to_json() const {
    nlohmann::json j;
    j["q0_homogeneity"] = q0_homogeneity;
    j["q1_growth"] = q1_growth;
    j["q2_axis_u"] = q2_axis_u;
    j["q3_axis_v"] = q3_axis_v;
    j["q4_positive"] = q4_positive;
    j["q5_monotone"] = q5_monotone;
    j["euler_max_rel"] = euler_max_rel;
    j["growth_constant"] = growth_constant;
    j["continuity_warning"] = continuity_warning;
    j["all_pass"] = all_pass();
    j["notes"] = notes;
    return j.dump(2);
}

} // namespace qlss
