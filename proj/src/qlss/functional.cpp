#include "qlss/functional.hpp"

#include <cmath>
#include <stdexcept>

namespace qlss {

namespace {
void check_state(const Grid& g, const StatePair& s, const char* who) {
    if (s.size() != g.node_count() ||
        s.z.size() != static_cast<std::size_t>(g.node_count()))
        throw std::invalid_argument(std::string(who) + ": state size mismatch");
}
void check_finite(const StatePair& s, const char* who) {
    for (double v : s.w)
        if (!std::isfinite(v)) throw std::domain_error(std::string(who) + ": non-finite state");
    for (double v : s.z)
        if (!std::isfinite(v)) throw std::domain_error(std::string(who) + ": non-finite state");
}
} // namespace

FunctionalContext FunctionalContext::penalized(const Grid& grid, const DualTransform& f,
                                               const PenalizedH& h, const PotentialSpec& W,
                                               const PotentialSpec& V, double eps) {
    if (!(eps > 0.0) || eps > 1.0)
        throw std::invalid_argument("FunctionalContext: eps must lie in (0, 1]");
    FunctionalContext c;
    c.grid_ = &grid;
    c.f_ = &f;
    c.h_ = &h;
    c.mode_ = Mode::penalized;
    c.eps_ = eps;
    c.Wf_ = W.sample(grid, eps);
    c.Vf_ = V.sample(grid, eps);
    const int n = grid.node_count();
    c.inside_.resize(n);
    for (int i = 0; i < n; ++i) {
        auto x = grid.node_position(i);
        for (auto& v : x) v *= eps;
        c.inside_[i] = h.omega().contains(x, grid.dimension()) ? 1 : 0;
    }
    return c;
}

FunctionalContext FunctionalContext::raw(const Grid& grid, const DualTransform& f,
                                         const HomogeneousQ& q, const PotentialSpec& W,
                                         const PotentialSpec& V, double eps) {
    if (!(eps > 0.0) || eps > 1.0)
        throw std::invalid_argument("FunctionalContext: eps must lie in (0, 1]");
    FunctionalContext c;
    c.grid_ = &grid;
    c.f_ = &f;
    c.q_ = &q;
    c.mode_ = Mode::raw;
    c.eps_ = eps;
    c.Wf_ = W.sample(grid, eps);
    c.Vf_ = V.sample(grid, eps);
    c.inside_.assign(grid.node_count(), 1);
    return c;
}

const HomogeneousQ& FunctionalContext::raw_q() const {
    return mode_ == Mode::raw ? *q_ : h_->q();
}

double FunctionalContext::coupling(int node, double fu, double fv) const {
    if (mode_ == Mode::raw) return q_->value(fu, fv);
    return h_->value(inside_[node] != 0, fu, fv);
}

HomogeneousQ::Grad FunctionalContext::coupling_grad(int node, double fu, double fv) const {
    if (mode_ == Mode::raw) return q_->grad(fu, fv);
    return h_->grad(inside_[node] != 0, fu, fv);
}

HomogeneousQ::Hess FunctionalContext::coupling_hessian(int node, double fu, double fv) const {
    if (mode_ == Mode::raw) return q_->hessian(fu, fv);
    return h_->hessian(inside_[node] != 0, fu, fv);
}

double phi(const FunctionalContext& ctx, const StatePair& s) {
    const Grid& g = ctx.grid();
    check_state(g, s, "phi");
    check_finite(s, "phi");
    const DualTransform& f = ctx.transform();
    double acc = 0.5 * (g.dirichlet_energy(s.w) + g.dirichlet_energy(s.z));
    const auto& nu = g.node_measure();
    const int n = g.node_count();
    for (int i = 0; i < n; ++i) {
        const double fu = f.value(s.w[i]);
        const double fv = f.value(s.z[i]);
        acc += nu[i] * (0.5 * ctx.W()[i] * fu * fu + 0.5 * ctx.V()[i] * fv * fv
                        - ctx.coupling(i, fu, fv));
    }
    return acc;
}

double i_eps(const FunctionalContext& ctx, const StatePair& s) {
    const Grid& g = ctx.grid();
    check_state(g, s, "i_eps");
    check_finite(s, "i_eps");
    const DualTransform& f = ctx.transform();
    const HomogeneousQ& q = ctx.raw_q();
    double acc = 0.5 * (g.dirichlet_energy(s.w) + g.dirichlet_energy(s.z));
    const auto& nu = g.node_measure();
    const int n = g.node_count();
    for (int i = 0; i < n; ++i) {
        const double fu = f.value(s.w[i]);
        const double fv = f.value(s.z[i]);
        acc += nu[i] * (0.5 * ctx.W()[i] * fu * fu + 0.5 * ctx.V()[i] * fv * fv
                        - q.value(fu, fv));
    }
    return acc;
}

void phi_grad(const FunctionalContext& ctx, const StatePair& s, StatePair& out) {
    const Grid& g = ctx.grid();
    check_state(g, s, "phi_grad");
    check_finite(s, "phi_grad");
    const DualTransform& f = ctx.transform();
    const int n = g.node_count();
    out.w.resize(n);
    out.z.resize(n);
    std::vector<double> Lw(n), Lz(n);
    g.laplacian_conservative(s.w, Lw);
    g.laplacian_conservative(s.z, Lz);
    for (int i = 0; i < n; ++i) {
        if (g.is_boundary(i)) {
            out.w[i] = out.z[i] = 0.0;
            continue;
        }
        const double fu = f.value(s.w[i]);
        const double fv = f.value(s.z[i]);
        const double du = DualTransform::derivative_from_value(fu);
        const double dv = DualTransform::derivative_from_value(fv);
        const auto hg = ctx.coupling_grad(i, fu, fv);
        out.w[i] = -Lw[i] + ctx.W()[i] * fu * du - hg.du * du;
        out.z[i] = -Lz[i] + ctx.V()[i] * fv * dv - hg.dv * dv;
    }
}

void residual_aux(const FunctionalContext& ctx, const StatePair& s, StatePair& out) {
    phi_grad(ctx, s, out);
}

double inner(const FunctionalContext& ctx, const StatePair& a, const StatePair& b) {
    const Grid& g = ctx.grid();
    check_state(g, a, "inner");
    check_state(g, b, "inner");
    const auto& nu = g.node_measure();
    double s = 0.0;
    const int n = g.node_count();
    for (int i = 0; i < n; ++i)
        s += nu[i] * (a.w[i] * b.w[i] + a.z[i] * b.z[i]);
    return s;
}

double grad_norm(const FunctionalContext& ctx, const StatePair& gfield) {
    return std::sqrt(inner(ctx, gfield, gfield));
}

double x_norm_sq(const FunctionalContext& ctx, const StatePair& s) {
    const Grid& g = ctx.grid();
    check_state(g, s, "x_norm_sq");
    const int n = g.node_count();
    std::vector<double> gw(n), gz(n), f(n);
    g.gradient_sq(s.w, gw);
    g.gradient_sq(s.z, gz);
    for (int i = 0; i < n; ++i)
        f[i] = gw[i] + gz[i] + ctx.W()[i] * s.w[i] * s.w[i]
             + ctx.V()[i] * s.z[i] * s.z[i];
    return g.integrate(f);
}

double psi(const FunctionalContext& ctx, const StatePair& s) {
    const Grid& g = ctx.grid();
    check_state(g, s, "psi");
    const DualTransform& f = ctx.transform();
    const int n = g.node_count();
    std::vector<double> gw(n), gz(n), acc(n);
    g.gradient_sq(s.w, gw);
    g.gradient_sq(s.z, gz);
    for (int i = 0; i < n; ++i) {
        const double fu = f.value(s.w[i]);
        const double fv = f.value(s.z[i]);
        acc[i] = gw[i] + gz[i] + ctx.W()[i] * fu * fu + ctx.V()[i] * fv * fv;
    }
    return g.integrate(acc);
}

double rescale_to_sphere(const FunctionalContext& ctx, const StatePair& s,
                         double rho, StatePair& out) {
    if (!(rho > 0.0)) throw std::invalid_argument("rescale_to_sphere: rho must be positive");
    const int n = s.size();
    auto scaled = [&](double t) {
        StatePair r(n);
        for (int i = 0; i < n; ++i) {
            r.w[i] = t * s.w[i];
            r.z[i] = t * s.z[i];
        }
        return r;
    };
    const double target = rho * rho;
    // psi vanishes only on the zero state (positive potentials), and rays of
    // nonzero states cross every sphere.
    if (!(psi(ctx, scaled(1.0)) > 0.0))
        throw std::invalid_argument("rescale_to_sphere: state is numerically zero");
    double hi = 1.0;
    while (psi(ctx, scaled(hi)) < target) {
        hi *= 2.0;
        if (hi > 1e18)
            throw std::runtime_error("rescale_to_sphere: bracket doubling failed");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (psi(ctx, scaled(mid)) < target) lo = mid; else hi = mid;
        if (hi - lo <= 1e-13 * hi) break;
    }
    out = scaled(0.5 * (lo + hi));
    return 0.5 * (lo + hi);
}

} // namespace qlss
