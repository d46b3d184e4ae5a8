#pragma once

#include "qlss/mountain_pass.hpp"
#include "qlss/penalization.hpp"
#include "qlss/potential.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlss {

// Malformed or contradictory configuration text.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Well-formed configuration that fails a hard mathematical precondition.
struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridConfig {
    enum class Kind { radial, box };
    Kind kind = Kind::radial;
    int dimension = 3;
    double radius = 20.0;       // radial truncation radius / box half-width
    int nodes = 400;            // radial node count / points per axis

    std::unique_ptr<Grid> build() const;
};

struct RunConfig {
    GridConfig grid;
    PotentialSpec W = PotentialSpec::constant(1.0);
    PotentialSpec V = PotentialSpec::constant(1.0);
    double p = 6.0;
    double pure_u = 0.0;
    double pure_v = 0.0;
    std::vector<MixedTerm> mixed{{1.0, 3.0, 3.0}};
    OmegaRegion omega = OmegaRegion::ball(10.0);
    bool a_auto = true;
    double a_explicit = 0.0;
    SolverConfig solver;
    std::vector<double> epsilon_list{1.0};
    std::string output_dir = "out";
    std::uint64_t seed = 42;
    std::string source_text; // raw config text, echoed into the manifest

    HomogeneousQ make_q() const;
    // Resolved plateau threshold: choose_a for "auto", the explicit value
    // otherwise.
    double resolve_a(const HomogeneousQ& q) const;

    static RunConfig from_json_text(const std::string& text);
    static RunConfig from_file(const std::string& path);
};

} // namespace qlss
