#pragma once

#include "qlss/grid.hpp"

#include <utility>
#include <vector>

namespace qlss {

// Radially symmetric potential profile with known positive floor and finite
// ceiling.  Three shapes:
//  * constant:    V == floor;
//  * class2_bump: V(x) = floor + 1 - exp(-|x|^2), whose minimum set is {0}
//    and whose gradient on the unit sphere has magnitude 2/e > 0 (the
//    non-degeneracy the concentration analysis needs);
//  * table:       piecewise-linear radial profile, clamped to its last value.
struct PotentialSpec {
    enum class Kind { constant, class2_bump, table };

    Kind kind = Kind::constant;
    double floor = 1.0;
    double ceiling = 1.0;
    std::vector<std::pair<double, double>> table; // (radius, value), increasing radii

    static PotentialSpec constant(double value);
    static PotentialSpec class2_bump(double floor);
    static PotentialSpec from_table(std::vector<std::pair<double, double>> table);

    double value(double r) const;
    // |grad V| at radius r (analytic for the bump, one-sided differences for
    // tables, zero for constants).
    double gradient_magnitude(double r) const;

    // W(eps * x_i) for every node.
    std::vector<double> sample(const Grid& grid, double eps) const;
};

} // namespace qlss
