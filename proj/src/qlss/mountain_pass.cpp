#include "qlss/mountain_pass.hpp"

#include "qlss/rng.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qlss {

void SolverConfig::validate() const {
    if (path_nodes < 9 || path_nodes % 2 == 0)
        throw std::invalid_argument("SolverConfig: path_nodes must be odd and >= 9");
    if (!(descent_step > 0.0))
        throw std::invalid_argument("SolverConfig: descent_step must be positive");
    if (!(grad_tolerance > 0.0))
        throw std::invalid_argument("SolverConfig: grad_tolerance must be positive");
    if (max_outer_iterations < 1)
        throw std::invalid_argument("SolverConfig: max_outer_iterations must be >= 1");
    if (!(rho > 0.0))
        throw std::invalid_argument("SolverConfig: rho must be positive");
}

namespace {

// C-infinity bump, value 1 at the center, support |x| < 1.
double mollifier(double rho) {
    if (rho >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - rho * rho));
}

double sup_abs(const StatePair& s) {
    double m = 0.0;
    for (double v : s.w) m = std::max(m, std::fabs(v));
    for (double v : s.z) m = std::max(m, std::fabs(v));
    return m;
}

StatePair lincomb(double a, const StatePair& x, double b, const StatePair& y) {
    const int n = x.size();
    StatePair r(n);
    for (int i = 0; i < n; ++i) {
        r.w[i] = a * x.w[i] + b * y.w[i];
        r.z[i] = a * x.z[i] + b * y.z[i];
    }
    return r;
}

double euclid_norm(const StatePair& s) {
    double acc = 0.0;
    for (double v : s.w) acc += v * v;
    for (double v : s.z) acc += v * v;
    return std::sqrt(acc);
}

double euclid_dist(const StatePair& a, const StatePair& b) {
    double acc = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        const double dw = a.w[i] - b.w[i];
        const double dz = a.z[i] - b.z[i];
        acc += dw * dw + dz * dz;
    }
    return std::sqrt(acc);
}

} // namespace

EndpointResult construct_endpoint(const FunctionalContext& ctx) {
    const Grid& g = ctx.grid();
    const int n = g.node_count();
    double region = g.domain_radius();
    if (ctx.mode() == FunctionalContext::Mode::penalized)
        region = ctx.penalized_h()->omega().inradius(g.dimension()) / ctx.epsilon();
    const double rb = std::min(0.9 * region, 0.85 * g.domain_radius());
    if (rb < 8.0 * g.mesh_width())
        throw geometry_error("construct_endpoint: bump support under 8 mesh widths");

    const auto& rad = g.node_radius();
    auto make_bump = [&](double sigma) {
        StatePair s(n);
        for (int i = 0; i < n; ++i) {
            double v = 0.0;
            if (!g.is_boundary(i))
                v = std::exp(-rad[i] * rad[i] / (2.0 * sigma * sigma)) *
                    mollifier(rad[i] / rb);
            s.w[i] = v;
            s.z[i] = v;
        }
        return s;
    };

    // Pick the profile width whose diagonal ray has the lowest barrier; the
    // seed path then starts close to the pass instead of far above it.
    static constexpr double kWidthOverSupport[] = {
        1.0 / 12.0, 1.0 / 9.0, 1.0 / 7.0, 1.0 / 5.5, 1.0 / 4.5,
        1.0 / 3.5,  1.0 / 2.8, 1.0 / 2.2, 1.0 / 1.8, 1.0 / 1.5,
    };
    double best_sigma = 0.0, best_barrier = 0.0, prev_sigma = -1.0;
    for (double frac : kWidthOverSupport) {
        const double sigma = std::max(frac * rb, 2.0 * g.mesh_width());
        if (sigma == prev_sigma) continue; // width floor collapses small entries
        prev_sigma = sigma;
        const double barrier = ray_maximum(ctx, make_bump(sigma));
        if (best_sigma == 0.0 || barrier < best_barrier) {
            best_sigma = sigma;
            best_barrier = barrier;
        }
    }
    StatePair bump = make_bump(best_sigma);
    double t = 1.0;
    for (int k = 0; k <= 60; ++k) {
        StatePair cand = lincomb(t, bump, 0.0, bump);
        const double pv = phi(ctx, cand);
        if (pv <= -1.0) {
            EndpointResult e;
            e.state = std::move(cand);
            e.scale = t;
            e.phi_value = pv;
            e.psi_value = psi(ctx, e.state);
            e.bump_radius = rb;
            return e;
        }
        t *= 2.0;
    }
    throw geometry_error("construct_endpoint: energy never drops below -1 "
                         "(coupling too weak along the diagonal)");
}

GeometryReport check_geometry(const FunctionalContext& ctx, double rho,
                              int sample_count, std::uint64_t seed) {
    if (sample_count < 1)
        throw std::invalid_argument("check_geometry: sample_count must be >= 1");
    const Grid& g = ctx.grid();
    const int n = g.node_count();
    const auto& rad = g.node_radius();
    const double R = g.domain_radius();
    Rng rng(seed);
    double alpha = std::numeric_limits<double>::infinity();
    StatePair scaled(n);
    for (int s = 0; s < sample_count; ++s) {
        StatePair cand(n);
        const int kind = s % 3;
        if (kind == 2) {
            // decaying noise
            for (int i = 0; i < n; ++i) {
                cand.w[i] = rng.symmetric(1.0) * std::exp(-rad[i] / (0.25 * R));
                cand.z[i] = rng.symmetric(1.0) * std::exp(-rad[i] / (0.25 * R));
            }
        } else {
            const double c = rng.uniform(0.0, 0.5 * R);
            const double width = rng.uniform(0.1 * R, 0.35 * R);
            const double aw = rng.uniform(0.2, 1.0);
            const double az = (kind == 0) ? aw : rng.uniform(0.2, 1.0);
            for (int i = 0; i < n; ++i) {
                const double v = mollifier(std::fabs(rad[i] - c) / width);
                cand.w[i] = aw * v;
                cand.z[i] = az * v;
            }
        }
        for (int i = 0; i < n; ++i)
            if (g.is_boundary(i)) cand.w[i] = cand.z[i] = 0.0;
        rescale_to_sphere(ctx, cand, rho, scaled);
        alpha = std::min(alpha, phi(ctx, scaled));
    }
    return {alpha, rho, sample_count};
}

namespace {

// Jacobian of the residual field in block order [w; z].  Boundary rows are
// identity.  Row scaling follows the node-measure form of the conservative
// Laplacian, so the matrix is the exact derivative of phi_grad.
void assemble_jacobian(const FunctionalContext& ctx, const StatePair& s,
                       Eigen::SparseMatrix<double>& J) {
    const Grid& g = ctx.grid();
    const DualTransform& f = ctx.transform();
    const int n = g.node_count();
    const auto& nu = g.node_measure();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(10 * n);
    for (const auto& l : g.flux_links()) {
        if (!g.is_boundary(l.a)) {
            trip.emplace_back(l.a, l.a, l.w / nu[l.a]);
            trip.emplace_back(l.a, l.b, -l.w / nu[l.a]);
            trip.emplace_back(n + l.a, n + l.a, l.w / nu[l.a]);
            trip.emplace_back(n + l.a, n + l.b, -l.w / nu[l.a]);
        }
        if (!g.is_boundary(l.b)) {
            trip.emplace_back(l.b, l.b, l.w / nu[l.b]);
            trip.emplace_back(l.b, l.a, -l.w / nu[l.b]);
            trip.emplace_back(n + l.b, n + l.b, l.w / nu[l.b]);
            trip.emplace_back(n + l.b, n + l.a, -l.w / nu[l.b]);
        }
    }
    for (int i = 0; i < n; ++i) {
        if (g.is_boundary(i)) {
            trip.emplace_back(i, i, 1.0);
            trip.emplace_back(n + i, n + i, 1.0);
            continue;
        }
        const double fu = f.value(s.w[i]);
        const double fv = f.value(s.z[i]);
        const double du = DualTransform::derivative_from_value(fu);
        const double dv = DualTransform::derivative_from_value(fv);
        const double d2u = DualTransform::second_derivative_from_value(fu);
        const double d2v = DualTransform::second_derivative_from_value(fv);
        const auto hg = ctx.coupling_grad(i, fu, fv);
        const auto hh = ctx.coupling_hessian(i, fu, fv);
        // d/dw [ W f f' - H_s f' ] = W (f'^2 + f f'') - (H_ss f'^2 + H_s f'')
        trip.emplace_back(i, i,
                          ctx.W()[i] * (du * du + fu * d2u)
                          - (hh.duu * du * du + hg.du * d2u));
        trip.emplace_back(n + i, n + i,
                          ctx.V()[i] * (dv * dv + fv * d2v)
                          - (hh.dvv * dv * dv + hg.dv * d2v));
        trip.emplace_back(i, n + i, -hh.duv * du * dv);
        trip.emplace_back(n + i, i, -hh.duv * du * dv);
    }
    J.resize(2 * n, 2 * n);
    J.setFromTriplets(trip.begin(), trip.end());
}

bool solve_linear(const Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& rhs,
                  Eigen::VectorXd& out) {
    if (J.rows() <= 10000) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(J);
        if (lu.info() == Eigen::Success) {
            out = lu.solve(rhs);
            return lu.info() == Eigen::Success && out.allFinite();
        }
        return false;
    }
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
    it.setTolerance(1e-12);
    it.setMaxIterations(2000);
    it.compute(J);
    if (it.info() != Eigen::Success) return false;
    out = it.solve(rhs);
    return it.info() == Eigen::Success && out.allFinite();
}

} // namespace

PolishReport polish_state(const FunctionalContext& ctx, StatePair& state,
                          double grad_target, SolverConfig::Polish method,
                          int max_iterations) {
    PolishReport rep;
    rep.method = method == SolverConfig::Polish::damped_newton ? "damped_newton"
               : method == SolverConfig::Polish::nonlinear_cg  ? "nonlinear_cg"
                                                               : "none";
    const Grid& g = ctx.grid();
    const int n = g.node_count();
    StatePair grad(n);
    phi_grad(ctx, state, grad);
    double gn = grad_norm(ctx, grad);
    rep.grad_norm_initial = rep.grad_norm_final = gn;
    if (method == SolverConfig::Polish::none) {
        rep.success = gn <= grad_target;
        return rep;
    }
    const double sup0 = sup_abs(state);
    if (sup0 == 0.0) {
        rep.rejected_trivial = true; // the zero state is the trivial critical point
        return rep;
    }

    const auto& nu = g.node_measure();
    Eigen::SparseMatrix<double> J;
    Eigen::VectorXd rhs(2 * n), delta(2 * n), dir_prev;
    double merit = gn * gn;
    StatePair cand(n), cgrad(n);
    Eigen::VectorXd mgrad_prev;

    auto try_direction = [&](const Eigen::VectorXd& dir) {
        for (double lambda = 1.0; lambda >= 1e-12; lambda *= 0.5) {
            for (int i = 0; i < n; ++i) {
                cand.w[i] = state.w[i] + lambda * dir[i];
                cand.z[i] = state.z[i] + lambda * dir[n + i];
            }
            phi_grad(ctx, cand, cgrad);
            const double mc = inner(ctx, cgrad, cgrad);
            if (mc <= merit * (1.0 - 1e-4 * lambda)) {
                state = cand;
                grad = cgrad;
                merit = mc;
                gn = std::sqrt(mc);
                return true;
            }
        }
        return false;
    };
    auto merit_descent_dir = [&] {
        // steepest descent on the squared residual norm: -J^T (nu . g)
        Eigen::VectorXd ng(2 * n);
        for (int i = 0; i < n; ++i) {
            ng[i] = nu[i] * grad.w[i];
            ng[n + i] = nu[i] * grad.z[i];
        }
        return Eigen::VectorXd(-(J.transpose() * ng));
    };

    for (int it = 0; it < max_iterations && gn > grad_target; ++it) {
        assemble_jacobian(ctx, state, J);
        bool newton_dir = false;
        if (method == SolverConfig::Polish::damped_newton) {
            for (int i = 0; i < n; ++i) {
                rhs[i] = -grad.w[i];
                rhs[n + i] = -grad.z[i];
            }
            newton_dir = solve_linear(J, rhs, delta);
        }
        if (!newton_dir) {
            Eigen::VectorXd mg = -merit_descent_dir();
            delta = -mg;
            if (method == SolverConfig::Polish::nonlinear_cg && mgrad_prev.size() == mg.size()) {
                const double denom = mgrad_prev.squaredNorm();
                if (denom > 0.0) {
                    double beta = mg.dot(mg - mgrad_prev) / denom; // Polak-Ribiere
                    beta = std::max(0.0, beta);
                    delta += beta * dir_prev;
                    if (delta.dot(-mg) <= 0.0) delta = -mg; // restart on non-descent
                }
            }
            mgrad_prev = mg;
            dir_prev = delta;
            const double dn = delta.norm();
            if (dn > 1.0) delta /= dn; // keep the first trial step bounded
            if (method == SolverConfig::Polish::damped_newton)
                ++rep.gradient_fallback_steps; // linear solve broke down
        }

        bool accepted = try_direction(delta);
        if (!accepted && newton_dir) {
            // Newton step rejected by the line search; retry along the merit
            // gradient before giving up.
            delta = merit_descent_dir();
            const double dn = delta.norm();
            if (dn > 1.0) delta /= dn;
            ++rep.gradient_fallback_steps;
            accepted = try_direction(delta);
        }
        ++rep.iterations;
        if (!accepted) {
            rep.stagnated = true;
            break;
        }
        if (sup_abs(state) < 1e-10 * sup0) {
            rep.rejected_trivial = true; // slid toward the trivial solution
            break;
        }
    }

    // Fold numerical dust on the positive solution back to zero.
    const double sup1 = sup_abs(state);
    int clamped = 0;
    for (int i = 0; i < n; ++i) {
        if (state.w[i] < 0.0 && state.w[i] >= -1e-12 * sup1) { state.w[i] = 0.0; ++clamped; }
        if (state.z[i] < 0.0 && state.z[i] >= -1e-12 * sup1) { state.z[i] = 0.0; ++clamped; }
    }
    rep.clamped_nodes = clamped;
    if (clamped > 0) {
        phi_grad(ctx, state, grad);
        gn = grad_norm(ctx, grad);
    }
    rep.grad_norm_final = gn;
    rep.success = gn <= grad_target;
    rep.reduced_100x = gn <= 1e-2 * rep.grad_norm_initial;
    return rep;
}

MPResult run_mountain_pass(const FunctionalContext& ctx, const SolverConfig& cfg) {
    cfg.validate();
    const Grid& g = ctx.grid();
    const int n = g.node_count();
    const int m = cfg.path_nodes;

    EndpointResult ep = construct_endpoint(ctx);
    MPResult res;
    res.endpoint_phi = ep.phi_value;
    res.endpoint_scale = ep.scale;
    res.rho = cfg.rho;

    std::vector<StatePair> path;
    path.reserve(m);
    for (int k = 0; k < m; ++k)
        path.push_back(lincomb(static_cast<double>(k) / (m - 1), ep.state, 0.0, ep.state));
    std::vector<double> pv(m);
    for (int k = 0; k < m; ++k) pv[k] = phi(ctx, path[k]);

    const bool polishing = cfg.polish != SolverConfig::Polish::none;
    const double stage_tol = polishing ? std::max(cfg.grad_tolerance, 1e-3)
                                       : cfg.grad_tolerance;
    StatePair grad(n);
    double step = cfg.descent_step;
    int kmax = 1;
    bool stage_done = false;
    bool stalled = false;
    StatePair candidate = path[1];
    double cand_gn = std::numeric_limits<double>::infinity();
    double best_max = std::numeric_limits<double>::infinity();
    int last_gain = 0;
    int outer = 0;
    for (; outer < cfg.max_outer_iterations && !stage_done; ++outer) {
        kmax = 1;
        for (int k = 2; k + 1 < m; ++k)
            if (pv[k] > pv[kmax]) kmax = k; // ties keep the lowest index
        if (pv[kmax] <= std::max(pv[0], pv[m - 1]))
            throw geometry_error("run_mountain_pass: path maximum escaped to an endpoint");

        phi_grad(ctx, path[kmax], grad);
        const double gn = grad_norm(ctx, grad);
        res.trace.push_back({outer, pv[kmax], gn});
        if (gn < cand_gn) {
            cand_gn = gn;
            candidate = path[kmax];
        }
        if (gn <= stage_tol) {
            stage_done = true;
            break;
        }
        if (pv[kmax] < best_max - 1e-9 * (1.0 + std::fabs(best_max))) {
            best_max = pv[kmax];
            last_gain = outer;
        } else if (outer - last_gain >= 250) {
            stalled = true; // barrier height plateaued: hand the candidate off
            break;
        }

        const double g2 = gn * gn;
        // Cap the displacement by the local node spacing so the moved node
        // cannot jump across a valley and tear the discrete path off the pass.
        const double ge = euclid_norm(grad);
        const double spacing = 0.5 * (euclid_dist(path[kmax], path[kmax - 1]) +
                                      euclid_dist(path[kmax], path[kmax + 1]));
        const double cap = ge > 0.0 ? 0.5 * spacing / ge : step;
        double t = std::max(std::min(step, cap), 1e-12);
        bool accepted = false;
        for (; t >= 1e-14; t *= 0.5) {
            StatePair cand = lincomb(1.0, path[kmax], -t, grad);
            const double pc = phi(ctx, cand);
            if (pc <= pv[kmax] - 1e-4 * t * g2) {
                path[kmax] = std::move(cand);
                pv[kmax] = pc;
                accepted = true;
                break;
            }
        }
        if (!accepted) break; // descent exhausted at floating-point resolution
        step = std::clamp(2.0 * t, 1e-12, 64.0 * cfg.descent_step);

        for (int nb : {kmax - 1, kmax + 1}) {
            if (nb >= 1 && nb + 1 < m) {
                path[nb] = lincomb(0.5, path[nb - 1], 0.5, path[nb + 1]);
                pv[nb] = phi(ctx, path[nb]);
            }
        }
    }
    res.outer_iterations = outer;
    res.state = std::move(candidate); // lowest-residual path maximum seen

    GeometryReport geo = check_geometry(ctx, cfg.rho, 32, cfg.seed);
    res.alpha_estimate = geo.alpha;

    res.polish = polish_state(ctx, res.state, cfg.grad_tolerance, cfg.polish);
    res.grad_norm = res.polish.grad_norm_final;
    res.energy = phi(ctx, res.state);
    // A critical point below the rim level alpha is the trivial one; finding
    // it means the path slid off the pass, not that the solve succeeded.
    const bool above_rim = res.energy >= res.alpha_estimate;
    res.converged = res.grad_norm <= cfg.grad_tolerance && above_rim;
    if (res.converged)
        res.status = "converged";
    else if (res.grad_norm <= cfg.grad_tolerance)
        res.status = "converged to a state below the rim level (trivial branch)";
    else if (res.polish.rejected_trivial)
        res.status = "polish rejected a collapse to the trivial state";
    else if (stalled)
        res.status = "descent stage stalled; residual above tolerance after polish";
    else if (!stage_done && res.outer_iterations >= cfg.max_outer_iterations)
        res.status = "descent stage hit max_outer_iterations";
    else
        res.status = "residual above tolerance after polish";
    return res;
}

double ray_maximum(const FunctionalContext& ctx, const StatePair& state,
                   double* t_star) {
    const int n = state.size();
    auto eval = [&](double t) {
        StatePair s(n);
        for (int i = 0; i < n; ++i) {
            s.w[i] = t * state.w[i];
            s.z[i] = t * state.z[i];
        }
        return phi(ctx, s);
    };
    double best_t = 1e-2, best = eval(best_t);
    for (int k = 1; k <= 120; ++k) {
        const double t = 1e-2 * std::pow(1.08, k); // up to ~ 1e2
        const double v = eval(t);
        if (v > best) { best = v; best_t = t; }
    }
    double lo = best_t / 1.08, hi = best_t * 1.08;
    const double gr = 0.61803398874989485;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            lo = x1; x1 = x2; f1 = f2; x2 = lo + gr * (hi - lo); f2 = eval(x2);
        } else {
            hi = x2; x2 = x1; f2 = f1; x1 = hi - gr * (hi - lo); f1 = eval(x1);
        }
    }
    const double t_best = 0.5 * (lo + hi);
    const double v_best = eval(t_best);
    if (t_star) *t_star = t_best;
    return v_best;
}

} // namespace qlss
