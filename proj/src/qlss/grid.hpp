#pragma once

#include <array>
#include <span>
#include <vector>

namespace qlss {

// Finite-difference grid with a homogeneous Dirichlet boundary.
//
// Two quadrature/weight families coexist on purpose:
//  * quad_weight(): trapezoid weights, used by integrate() and the norm
//    helpers (they vanish at the radial origin node);
//  * node_measure(): finite-volume dual-cell measures, strictly positive on
//    every non-boundary node.  The energy of a field in link form
//    (dirichlet_energy) together with node_measure makes the flux-difference
//    Laplacian (laplacian_conservative) the EXACT gradient of the discrete
//    energy, which the functional module relies on.
// laplacian() is the plain compact stencil (exact on quadratics through the
// radial origin); it is the right operator for pointwise residuals but is
// not the energy gradient.
class Grid {
public:
    struct FluxLink {
        int a, b;   // node ids
        double w;   // energy weight: dirichlet_energy = sum w (f_a - f_b)^2
    };

    virtual ~Grid() = default;

    int node_count() const { return static_cast<int>(radius_.size()); }
    int dimension() const { return dim_; }
    bool is_boundary(int i) const { return boundary_[i] != 0; }
    const std::vector<double>& node_radius() const { return radius_; }
    const std::vector<double>& quad_weight() const { return quad_w_; }
    const std::vector<double>& node_measure() const { return measure_; }
    const std::vector<FluxLink>& flux_links() const { return links_; }

    virtual std::array<double, 3> node_position(int i) const = 0;
    virtual double mesh_width() const = 0;
    virtual double domain_radius() const = 0; // truncation radius (box: inradius)

    double integrate(std::span<const double> f) const;
    // sum over links of w (f_a - f_b)^2  ==  discrete int |grad f|^2.
    double dirichlet_energy(std::span<const double> f) const;
    // (L f)_i = -(1/nu_i) d(dirichlet_energy/2)/df_i; zero on boundary rows.
    void laplacian_conservative(std::span<const double> f, std::span<double> out) const;

    virtual void laplacian(std::span<const double> f, std::span<double> out) const = 0;
    // Nodewise |grad f|^2 by central differences.
    virtual void gradient_sq(std::span<const double> f, std::span<double> out) const = 0;

protected:
    int dim_ = 0;
    std::vector<double> radius_;
    std::vector<double> quad_w_;
    std::vector<double> measure_;
    std::vector<unsigned char> boundary_;
    std::vector<FluxLink> links_;
};

// Radial mesh for spherically symmetric fields in dimension N >= 3:
// nodes r_i = i h, h = R/(n-1), Dirichlet at r = R.
class RadialGrid final : public Grid {
public:
    RadialGrid(int N, double R, int n);

    std::array<double, 3> node_position(int i) const override;
    double mesh_width() const override { return h_; }
    double domain_radius() const override { return R_; }
    void laplacian(std::span<const double> f, std::span<double> out) const override;
    void gradient_sq(std::span<const double> f, std::span<double> out) const override;

    double R() const { return R_; }
    double sphere_area() const { return area_; } // |S^{N-1}|

private:
    double R_, h_, area_;
};

// Tensor-product box [-L, L]^d, d in {2, 3}, Dirichlet on all faces.
class BoxGrid final : public Grid {
public:
    BoxGrid(int d, double L, int m);

    std::array<double, 3> node_position(int i) const override;
    double mesh_width() const override { return h_; }
    double domain_radius() const override { return L_; }
    void laplacian(std::span<const double> f, std::span<double> out) const override;
    void gradient_sq(std::span<const double> f, std::span<double> out) const override;

    double L() const { return L_; }
    int points_per_axis() const { return m_; }

private:
    int index(int ix, int iy, int iz) const;
    double L_, h_;
    int m_;
};

// Two-component field sampled on a grid.
struct StatePair {
    std::vector<double> w, z;

    StatePair() = default;
    explicit StatePair(int n) : w(n, 0.0), z(n, 0.0) {}
    int size() const { return static_cast<int>(w.size()); }
};

} // namespace qlss
