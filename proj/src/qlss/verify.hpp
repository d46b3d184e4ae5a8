#pragma once

#include "qlss/functional.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qlss {

// u = f(w), v = f(z) node-wise: candidate solution of the original
// quasilinear system recovered from the transformed one.
StatePair map_back(const DualTransform& f, const StatePair& s);

// Weak-form defect of (u, v) against the untouched system in the fast
// variable: for each test function  T1 + T2 + T3 - T4  with
//   T1 = int (1 + 2u^2) grad u . grad test      (link/cell assembly)
//   T2 = 2 int |grad u|^2 u test                (dual-cell nodes)
//   T3 = int W(eps x) u test
//   T4 = int Q_u(u, v) test
// normalized per equation by |T1|+|T2|+|T3|+|T4|.  Returns the max over the
// bank and both equations.
struct WeakResidualReport {
    double max_defect = 0.0;
    int bank_size = 0;
    std::vector<double> defects; // per test function, max of the two equations
};
WeakResidualReport weak_residual_original(const FunctionalContext& ctx,
                                          const StatePair& uv,
                                          int bank_size = 16,
                                          std::uint64_t seed = 2024);

// sup of |(f(w), f(z))| over nodes outside the confinement region; the
// penalized and original couplings agree on the state iff this stays below a.
struct ConsistencyReport {
    double outside_sup = 0.0;   // max amplitude |(u,v)| outside
    double a = 0.0;             // plateau threshold
    double w_threshold = 0.0;   // f^{-1}(a/2), the contradiction level
    double outside_sup_wz = 0.0;
    bool ok = false;            // outside_sup < a
    bool below_half_level = false; // outside w,z stay under f^{-1}(a/2)
};
ConsistencyReport penalization_consistency(const FunctionalContext& ctx,
                                           const StatePair& s);

// Least-squares fit  log u ~ log C1 - (C2/eps) |x|  over the outer tail of
// the grid.  The outermost 8% of the radius is excluded first (Dirichlet
// truncation bends the profile there), then the window keeps the outer
// tail_fraction of what remains, above an absolute floor of 1e-14.
struct DecayFit {
    double C1 = 0.0;       // amplitude factor
    double C2 = 0.0;       // decay rate in the slow variable (slope * eps)
    double r_squared = 0.0;
    int nodes_used = 0;
    double window_lo = 0.0, window_hi = 0.0;
};
DecayFit decay_fit(const Grid& grid, const std::vector<double>& u, double eps,
                   double tail_fraction = 0.25);

// max |(w, z)| over the nodes within one mesh width of the given ring radius.
double ring_max(const Grid& grid, const StatePair& s, double ring_radius);

struct VerificationReport {
    bool positivity_ok = false;
    bool nontrivial_ok = false;        // both components carry mass
    ConsistencyReport consistency;
    WeakResidualReport weak;
    DecayFit decay_u, decay_v;
    double weak_tolerance = 1e-3;
    double decay_r2_min = 0.99;
    bool ok() const {
        return positivity_ok && nontrivial_ok && consistency.ok &&
               weak.max_defect <= weak_tolerance &&
               decay_u.r_squared >= decay_r2_min && decay_u.C1 > 0.0 && decay_u.C2 > 0.0 &&
               decay_v.r_squared >= decay_r2_min && decay_v.C1 > 0.0 && decay_v.C2 > 0.0;
    }
    std::string to_json() const;
};

// Full post-solve verification of a converged state on a penalized context.
VerificationReport verify_solution(const FunctionalContext& ctx, const StatePair& s);

} // namespace qlss
