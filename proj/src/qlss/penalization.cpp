#include "qlss/penalization.hpp"

#include "qlss/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlss {

CutoffEta::CutoffEta(double a_) : a(a_) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::invalid_argument("CutoffEta: threshold must be positive");
}

double CutoffEta::value(double s) const {
    if (s <= a) return 1.0;
    if (s >= 5.0 * a) return 0.0;
    const double tau = (s - a) / (4.0 * a);
    return 1.0 + tau * tau * (2.0 * tau - 3.0);
}

double CutoffEta::derivative(double s) const {
    if (s <= a || s >= 5.0 * a) return 0.0;
    const double tau = (s - a) / (4.0 * a);
    return 6.0 * tau * (tau - 1.0) / (4.0 * a);
}

double CutoffEta::second_derivative(double s) const {
    if (s <= a || s >= 5.0 * a) return 0.0;
    const double tau = (s - a) / (4.0 * a);
    return (12.0 * tau - 6.0) / (16.0 * a * a);
}

OmegaRegion OmegaRegion::ball(double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("OmegaRegion: ball radius must be positive");
    OmegaRegion o;
    o.kind = Kind::ball;
    o.radius = radius;
    return o;
}

OmegaRegion OmegaRegion::box(std::array<double, 3> half_widths) {
    for (double h : half_widths)
        if (!(h > 0.0) || !std::isfinite(h))
            throw std::invalid_argument("OmegaRegion: box half-widths must be positive");
    OmegaRegion o;
    o.kind = Kind::box;
    o.half_widths = half_widths;
    return o;
}

bool OmegaRegion::contains(const std::array<double, 3>& x, int dim) const {
    if (kind == Kind::ball) {
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) r2 += x[d] * x[d];
        return r2 < radius * radius;
    }
    for (int d = 0; d < dim; ++d)
        if (std::fabs(x[d]) >= half_widths[d]) return false;
    return true;
}

double OmegaRegion::inradius(int dim) const {
    if (kind == Kind::ball) return radius;
    double r = half_widths[0];
    for (int d = 1; d < dim; ++d) r = std::min(r, half_widths[d]);
    return r;
}

namespace {

// Max of Q over the first-quadrant arc of the unit circle: dense sweep plus
// golden-section refinement around the best sample.
double angular_max(const HomogeneousQ& q) {
    const double half_pi = 1.57079632679489661923;
    const int n = 2048;
    double best = 0.0, best_phi = half_pi / 2.0;
    for (int k = 0; k <= n; ++k) {
        const double phi = half_pi * k / n;
        const double v = q.value(std::cos(phi), std::sin(phi));
        if (v > best) { best = v; best_phi = phi; }
    }
    if (best <= 0.0) return 0.0;
    double lo = std::max(0.0, best_phi - half_pi / n);
    double hi = std::min(half_pi, best_phi + half_pi / n);
    const double gr = 0.61803398874989485;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = q.value(std::cos(x1), std::sin(x1));
    double f2 = q.value(std::cos(x2), std::sin(x2));
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = q.value(std::cos(x2), std::sin(x2));
        } else {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = q.value(std::cos(x1), std::sin(x1));
        }
    }
    return std::max(best, std::max(f1, f2));
}

// Lattice check of the two confinement inequalities on the annulus
// r in (0, 6a], full circle, with the floor potentials.  Used by choose_a
// and (densified) by verify_H_bounds.
bool h3_lattice_ok(const PenalizedH& h, int n_rad, int n_ang) {
    const double a = h.a();
    const double min_wv = std::min(h.W_floor(), h.V_floor());
    const double lhs_cap = min_wv / h.k();
    const double der_cap = a * min_wv / 4.0;
    const double two_pi = 6.28318530717958647692;
    for (int i = 1; i <= n_rad; ++i) {
        const double r = 6.0 * a * i / n_rad;
        for (int j = 0; j < n_ang; ++j) {
            const double phi = two_pi * j / n_ang;
            const double s = r * std::cos(phi), t = r * std::sin(phi);
            const auto g = h.grad(false, s, t);
            const double growth = s * g.du + t * g.dv;
            const double cap = lhs_cap * (h.W_floor() * s * s + h.V_floor() * t * t) / min_wv;
            if (growth > cap + 1e-12 * (std::fabs(growth) + r * r)) return false;
            if (std::fabs(g.du) > der_cap * (1.0 + 1e-12) ||
                std::fabs(g.dv) > der_cap * (1.0 + 1e-12)) return false;
        }
    }
    // Scale-free far branch: s H_s + t H_t = 2 A r^2 <= (min/k) r^2.
    return 2.0 * h.A() <= min_wv / h.k() * (1.0 + 1e-12);
}

} // namespace

double compute_A(const HomogeneousQ& q, double a) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::invalid_argument("compute_A: threshold must be positive");
    const double m = angular_max(q);
    if (m <= 0.0) return 0.0;
    return std::pow(5.0 * a, q.p() - 2.0) * m;
}

double choose_a(const HomogeneousQ& q, double W_floor, double V_floor) {
    if (!(W_floor > 0.0) || !(V_floor > 0.0))
        throw std::invalid_argument("choose_a: potential floors must be positive");
    const double cap = std::min(W_floor, V_floor) / 4.0;
    const OmegaRegion dummy = OmegaRegion::ball(1.0);
    for (int j = 0; j <= 60; ++j) {
        const double a = std::ldexp(1.0, -j);
        const double A = compute_A(q, a);
        if (!(A < cap)) continue;
        PenalizedH h(q, a, dummy, W_floor, V_floor);
        if (h3_lattice_ok(h, 96, 64)) return 0.5 * a;
    }
    throw std::runtime_error("choose_a: no admissible threshold on the dyadic grid");
}

PenalizedH::PenalizedH(HomogeneousQ q, double a, OmegaRegion omega,
                       double W_floor, double V_floor)
    : q_(std::move(q)), eta_(a), omega_(omega), a_(a), A_(compute_A(q_, a)),
      k_(4.0 * q_.p() / (q_.p() - 2.0)), W0_(W_floor), V0_(V_floor) {
    if (!(W0_ > 0.0) || !(V0_ > 0.0) || !std::isfinite(W0_) || !std::isfinite(V0_))
        throw std::invalid_argument("PenalizedH: potential floors must be positive");
}

bool PenalizedH::smallness_ok() const {
    return A_ < std::min(W0_, V0_) / 4.0;
}

double PenalizedH::value(bool inside, double s, double t) const {
    if (inside) return q_.value(s, t);
    const double r2 = s * s + t * t;
    const double r = std::sqrt(r2);
    if (r <= a_) return q_.value(s, t); // plateau: exact passthrough
    if (r >= 5.0 * a_) return A_ * r2;
    const double G = q_.value(s, t) - A_ * r2;
    return eta_.value(r) * G + A_ * r2;
}

HomogeneousQ::Grad PenalizedH::grad(bool inside, double s, double t) const {
    if (inside) return q_.grad(s, t);
    const double r2 = s * s + t * t;
    const double r = std::sqrt(r2);
    if (r <= a_) return q_.grad(s, t);
    if (r >= 5.0 * a_) return {2.0 * A_ * s, 2.0 * A_ * t};
    const auto qg = q_.grad(s, t);
    const double G = q_.value(s, t) - A_ * r2;
    const double Gs = qg.du - 2.0 * A_ * s;
    const double Gt = qg.dv - 2.0 * A_ * t;
    const double e = eta_.value(r), ep = eta_.derivative(r);
    return {ep * (s / r) * G + e * Gs + 2.0 * A_ * s,
            ep * (t / r) * G + e * Gt + 2.0 * A_ * t};
}

HomogeneousQ::Hess PenalizedH::hessian(bool inside, double s, double t) const {
    if (inside) return q_.hessian(s, t);
    const double r2 = s * s + t * t;
    const double r = std::sqrt(r2);
    if (r <= a_) return q_.hessian(s, t);
    if (r >= 5.0 * a_) return {2.0 * A_, 0.0, 2.0 * A_};
    const auto qg = q_.grad(s, t);
    const auto qh = q_.hessian(s, t);
    const double G = q_.value(s, t) - A_ * r2;
    const double Gs = qg.du - 2.0 * A_ * s;
    const double Gt = qg.dv - 2.0 * A_ * t;
    const double Gss = qh.duu - 2.0 * A_;
    const double Gst = qh.duv;
    const double Gtt = qh.dvv - 2.0 * A_;
    const double e = eta_.value(r), ep = eta_.derivative(r),
                 epp = eta_.second_derivative(r);
    const double r3 = r2 * r;
    const double duu = epp * (s * s / r2) * G + ep * (t * t / r3) * G
                     + 2.0 * ep * (s / r) * Gs + e * Gss + 2.0 * A_;
    const double dvv = epp * (t * t / r2) * G + ep * (s * s / r3) * G
                     + 2.0 * ep * (t / r) * Gt + e * Gtt + 2.0 * A_;
    const double duv = epp * (s * t / r2) * G
                     + ep * ((s / r) * Gt + (t / r) * Gs - (s * t / r3) * G)
                     + e * Gst;
    return {duu, duv, dvv};
}

HBoundReport verify_H_bounds(const PenalizedH& h, int sample_count,
                             std::uint64_t seed) {
    if (sample_count < 1000)
        throw std::invalid_argument("verify_H_bounds: sample_count must be >= 1000");
    HBoundReport rep;
    rep.smallness_ok = h.smallness_ok();
    const double a = h.a();
    const double p = h.q().p();
    const double min_wv = std::min(h.W_floor(), h.V_floor());
    rep.far_branch_scale_ok = 2.0 * h.A() <= min_wv / h.k() * (1.0 + 1e-12);

    Rng rng(seed);
    const double two_pi = 6.28318530717958647692;
    for (int i = 0; i < sample_count; ++i) {
        double s, t;
        if (i == 0) {
            s = t = 0.0; // origin: every inequality is trivially tight
        } else {
            double r;
            if (i % 16 == 1) r = a;             // inner seam
            else if (i % 16 == 9) r = 5.0 * a;  // outer seam
            else r = 6.0 * a * rng.uniform01();
            const double phi = two_pi * rng.uniform01();
            s = r * std::cos(phi);
            t = r * std::sin(phi);
        }
        const bool inside = (i % 2 == 0);
        const double H = h.value(inside, s, t);
        const auto g = h.grad(inside, s, t);
        const double radial = s * g.du + t * g.dv;
        ++rep.samples;
        if (inside) {
            // (H1): p H = s H_s + t H_t (Euler, H == Q there).
            const double rel = std::fabs(p * H - radial) /
                               (std::fabs(p * H) + 1e-300);
            rep.h1_max_rel = std::max(rep.h1_max_rel, rel);
            if (H != 0.0 && rel > 1e-9) ++rep.h1_violations;
        } else {
            const double scale = std::fabs(H) + std::fabs(radial) + 1.0;
            // (H2): s H_s + t H_t - 2 H >= 0.
            const double slack = (radial - 2.0 * H) / scale;
            rep.h2_min = std::min(rep.h2_min, slack);
            if (slack < -1e-12) ++rep.h2_violations;
            // (H3) growth: s H_s + t H_t <= (W0 s^2 + V0 t^2)/k.
            const double cap = (h.W_floor() * s * s + h.V_floor() * t * t) / h.k();
            const double over = (radial - cap) / scale;
            rep.h3_growth_max = std::max(rep.h3_growth_max, over);
            if (over > 1e-12) ++rep.h3_growth_violations;
            // (H3) derivative bound: |H_s|, |H_t| <= a min(W0,V0)/4.
            const double der_cap = a * min_wv / 4.0;
            const double dmax = std::max(std::fabs(g.du), std::fabs(g.dv));
            const double dover = (dmax - der_cap) / (der_cap + 1e-300);
            rep.h3_derivative_max = std::max(rep.h3_derivative_max, dover);
            if (dover > 1e-12) ++rep.h3_derivative_violations;
        }
    }
    return rep;
}

std::string HBoundReport::to_json() const {
    nlohmann::json j;
    j["samples"] = samples;
    j["h1_violations"] = h1_violations;
    j["h2_violations"] = h2_violations;
    j["h3_growth_violations"] = h3_growth_violations;
    j["h3_derivative_violations"] = h3_derivative_violations;
    j["h1_max_rel"] = h1_max_rel;
    j["h2_min"] = h2_min;
    j["h3_growth_max"] = h3_growth_max;
    j["h3_derivative_max"] = h3_derivative_max;
    j["far_branch_scale_ok"] = far_branch_scale_ok;
    j["smallness_ok"] = smallness_ok;
    j["all_ok"] = all_ok();
    return j.dump(2);
}

} // namespace qlss
