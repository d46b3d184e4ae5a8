#pragma once

#include "qlss/functional.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlss {

// Raised when the mountain-pass geometry cannot be realized on the grid
// (no admissible bump, endpoint doubling fails, or the path maximum escapes
// to an endpoint).
struct geometry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverConfig {
    int path_nodes = 17;            // odd, >= 9
    double descent_step = 0.5;      // initial Armijo trial step
    double grad_tolerance = 1e-8;   // final residual target
    int max_outer_iterations = 4000;
    enum class Polish { none, damped_newton, nonlinear_cg };
    Polish polish = Polish::damped_newton;
    double rho = 0.3;               // sphere radius for the geometry estimate
    std::uint64_t seed = 42;

    void validate() const;
};

struct TraceRow {
    int iteration;
    double energy;     // value at the path maximum
    double grad_norm;  // residual norm at the path maximum
};

struct EndpointResult {
    StatePair state;
    double scale;       // multiple of the bump pair
    double phi_value;   // <= -1 by construction
    double psi_value;
    double bump_radius;
};

struct GeometryReport {
    double alpha;  // min of phi over sampled states on the psi-sphere
    double rho;
    int samples;
};

struct PolishReport {
    std::string method;
    int iterations = 0;
    double grad_norm_initial = 0.0;
    double grad_norm_final = 0.0;
    bool success = false;          // reached the target tolerance
    bool reduced_100x = false;
    bool rejected_trivial = false; // input (or iterate) collapsed to zero
    bool stagnated = false;
    int gradient_fallback_steps = 0; // iterations that used the merit gradient
    int clamped_nodes = 0;
};

struct MPResult {
    StatePair state;
    double energy = 0.0;
    double grad_norm = 0.0;
    double alpha_estimate = 0.0;
    double rho = 0.0;
    double endpoint_phi = 0.0;
    double endpoint_scale = 0.0;
    int outer_iterations = 0;
    bool converged = false;
    std::string status;
    PolishReport polish;
    std::vector<TraceRow> trace;
};

// Smooth radial bump pair scaled until phi drops below -1.  The bump lives
// inside the confinement region (or well inside the grid for raw contexts)
// and must cover at least 8 mesh widths.
EndpointResult construct_endpoint(const FunctionalContext& ctx);

// alpha > 0 evidence: random states rescaled onto the psi-sphere of radius
// rho; reports the smallest phi seen.
GeometryReport check_geometry(const FunctionalContext& ctx, double rho,
                              int sample_count = 32, std::uint64_t seed = 42);

// Drives the strong-form residual to the target tolerance from a near-critical
// state: damped Newton on the residual field (sparse direct or iterative
// linear solves), or nonlinear CG on the squared residual norm.  The state is
// updated in place; a line search guards against collapsing to zero.
PolishReport polish_state(const FunctionalContext& ctx, StatePair& state,
                          double grad_target, SolverConfig::Polish method,
                          int max_iterations = 60);

// Full pipeline: endpoint, linear seed path, repeated descent of the path
// maximum with neighbor re-tensioning, then the configured polish stage.
// The descent stage stops at max(grad_tolerance, 1e-3) when a polish stage
// follows; the polish owns the final tolerance.
MPResult run_mountain_pass(const FunctionalContext& ctx, const SolverConfig& cfg);

// Maximum of phi along the ray t -> t * state (Nehari-type cross-check: at a
// critical point the maximizer sits at t = 1).  Returns the maximum value and
// stores the maximizer in t_star when non-null.
double ray_maximum(const FunctionalContext& ctx, const StatePair& state,
                   double* t_star = nullptr);

} // namespace qlss
