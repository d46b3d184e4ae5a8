#pragma once

#include "qlss/dual_transform.hpp"
#include "qlss/grid.hpp"
#include "qlss/penalization.hpp"
#include "qlss/potential.hpp"

#include <vector>

namespace qlss {

// Everything needed to evaluate the transformed energy on a grid at one value
// of the scale parameter eps:
//   phi(w, z) = 1/2 int |grad w|^2 + |grad z|^2 + W(eps x) f(w)^2 + V(eps x) f(z)^2
//             - int H(eps x, f(w), f(z)),
// where f is the dual transform and H is either the penalized coupling (mode
// penalized) or the raw truncated Q (mode raw; this is the energy whose
// critical points solve the untouched system).
//
// Discretization contract: phi_grad is the exact gradient of phi with respect
// to the node values under the node_measure pairing, so
//   d/dt phi(state + t delta) |_{t=0} = inner(phi_grad(state), delta)
// holds to rounding.  Kinetic terms use the link form, zero-order terms the
// dual-cell measures.  Boundary nodes are pinned (gradient zero).
class FunctionalContext {
public:
    enum class Mode { penalized, raw };

    static FunctionalContext penalized(const Grid& grid, const DualTransform& f,
                                       const PenalizedH& h, const PotentialSpec& W,
                                       const PotentialSpec& V, double eps);
    static FunctionalContext raw(const Grid& grid, const DualTransform& f,
                                 const HomogeneousQ& q, const PotentialSpec& W,
                                 const PotentialSpec& V, double eps);

    const Grid& grid() const { return *grid_; }
    const DualTransform& transform() const { return *f_; }
    Mode mode() const { return mode_; }
    double epsilon() const { return eps_; }
    const std::vector<double>& W() const { return Wf_; }
    const std::vector<double>& V() const { return Vf_; }
    const std::vector<unsigned char>& inside_omega() const { return inside_; }
    const PenalizedH* penalized_h() const { return h_; }
    const HomogeneousQ& raw_q() const;

    double coupling(int node, double fu, double fv) const;
    HomogeneousQ::Grad coupling_grad(int node, double fu, double fv) const;
    HomogeneousQ::Hess coupling_hessian(int node, double fu, double fv) const;

private:
    FunctionalContext() = default;
    const Grid* grid_ = nullptr;
    const DualTransform* f_ = nullptr;
    const PenalizedH* h_ = nullptr;
    const HomogeneousQ* q_ = nullptr;
    Mode mode_ = Mode::penalized;
    double eps_ = 1.0;
    std::vector<double> Wf_, Vf_;
    std::vector<unsigned char> inside_;
};

double phi(const FunctionalContext& ctx, const StatePair& s);
// Energy with the raw truncated coupling (equals phi when every node outside
// the region keeps |(f(w), f(z))| on the plateau).
double i_eps(const FunctionalContext& ctx, const StatePair& s);
void phi_grad(const FunctionalContext& ctx, const StatePair& s, StatePair& out);
// Strong-form residual field assembled node by node; identical to phi_grad
// by construction and kept as a separate entry point for cross-checking.
void residual_aux(const FunctionalContext& ctx, const StatePair& s, StatePair& out);

// Node-measure inner product of two state pairs.
double inner(const FunctionalContext& ctx, const StatePair& a, const StatePair& b);
double grad_norm(const FunctionalContext& ctx, const StatePair& g);

// Squared X-norm: int |grad w|^2 + |grad z|^2 + W w^2 + V z^2 (trapezoid).
double x_norm_sq(const FunctionalContext& ctx, const StatePair& s);
// Sphere functional: int |grad w|^2 + |grad z|^2 + W f(w)^2 + V f(z)^2.
double psi(const FunctionalContext& ctx, const StatePair& s);

// Smallest t > 0 with psi(t * s) = rho^2 (psi is strictly increasing along
// rays of nonzero states); bisection after bracket doubling.
double rescale_to_sphere(const FunctionalContext& ctx, const StatePair& s,
                         double rho, StatePair& out);

} // namespace qlss
