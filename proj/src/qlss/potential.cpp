#include "qlss/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlss {

PotentialSpec PotentialSpec::constant(double value) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw std::invalid_argument("PotentialSpec: constant value must be positive");
    PotentialSpec p;
    p.kind = Kind::constant;
    p.floor = p.ceiling = value;
    return p;
}

PotentialSpec PotentialSpec::class2_bump(double floor) {
    if (!(floor > 0.0) || !std::isfinite(floor))
        throw std::invalid_argument("PotentialSpec: floor must be positive");
    PotentialSpec p;
    p.kind = Kind::class2_bump;
    p.floor = floor;
    p.ceiling = floor + 1.0;
    return p;
}

PotentialSpec PotentialSpec::from_table(std::vector<std::pair<double, double>> table) {
    if (table.size() < 2)
        throw std::invalid_argument("PotentialSpec: table needs at least two rows");
    double lo = table.front().second, hi = lo;
    double prev_r = -1.0;
    for (const auto& [r, v] : table) {
        if (!(r >= 0.0) || r <= prev_r)
            throw std::invalid_argument("PotentialSpec: table radii must increase");
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("PotentialSpec: table values must be positive");
        prev_r = r;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    PotentialSpec p;
    p.kind = Kind::table;
    p.table = std::move(table);
    p.floor = lo;
    p.ceiling = hi;
    return p;
}

double PotentialSpec::value(double r) const {
    switch (kind) {
    case Kind::constant:
        return floor;
    case Kind::class2_bump:
        return floor + 1.0 - std::exp(-r * r);
    case Kind::table: {
        if (r <= table.front().first) return table.front().second;
        if (r >= table.back().first) return table.back().second;
        auto it = std::upper_bound(table.begin(), table.end(), r,
                                   [](double x, const auto& row) { return x < row.first; });
        const auto& [r1, v1] = *it;
        const auto& [r0, v0] = *(it - 1);
        const double t = (r - r0) / (r1 - r0);
        return v0 + t * (v1 - v0);
    }
    }
    return floor;
}

double PotentialSpec::gradient_magnitude(double r) const {
    switch (kind) {
    case Kind::constant:
        return 0.0;
    case Kind::class2_bump:
        return 2.0 * r * std::exp(-r * r);
    case Kind::table: {
        const double h = 1e-6 * std::max(1.0, r);
        return std::fabs(value(r + h) - value(std::max(0.0, r - h))) /
               (r + h - std::max(0.0, r - h));
    }
    }
    return 0.0;
}

std::vector<double> PotentialSpec::sample(const Grid& grid, double eps) const {
    const auto& rad = grid.node_radius();
    std::vector<double> out(rad.size());
    for (std::size_t i = 0; i < rad.size(); ++i)
        out[i] = value(eps * rad[i]);
    return out;
}

} // namespace qlss
