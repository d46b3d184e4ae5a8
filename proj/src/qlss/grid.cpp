#include "qlss/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlss {

double Grid::integrate(std::span<const double> f) const {
    if (f.size() != quad_w_.size())
        throw std::invalid_argument("Grid::integrate: field size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += quad_w_[i] * f[i];
    return s;
}

double Grid::dirichlet_energy(std::span<const double> f) const {
    if (static_cast<int>(f.size()) != node_count())
        throw std::invalid_argument("Grid::dirichlet_energy: field size mismatch");
    double s = 0.0;
    for (const auto& l : links_) {
        const double d = f[l.a] - f[l.b];
        s += l.w * d * d;
    }
    return s;
}

void Grid::laplacian_conservative(std::span<const double> f,
                                  std::span<double> out) const {
    const int n = node_count();
    if (static_cast<int>(f.size()) != n || static_cast<int>(out.size()) != n)
        throw std::invalid_argument("Grid::laplacian_conservative: size mismatch");
    for (int i = 0; i < n; ++i) out[i] = 0.0;
    for (const auto& l : links_) {
        const double flux = l.w * (f[l.a] - f[l.b]);
        out[l.a] -= flux;
        out[l.b] += flux;
    }
    for (int i = 0; i < n; ++i)
        out[i] = boundary_[i] ? 0.0 : out[i] / measure_[i];
}

namespace {
double unit_sphere_area(int N) {
    // |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2)
    const double pi = 3.14159265358979323846;
    return 2.0 * std::pow(pi, 0.5 * N) / std::tgamma(0.5 * N);
}
} // namespace

RadialGrid::RadialGrid(int N, double R, int n) {
    if (N < 3) throw std::invalid_argument("RadialGrid: dimension must be >= 3");
    if (!(R > 0.0) || !std::isfinite(R))
        throw std::invalid_argument("RadialGrid: radius must be positive");
    if (n < 64) throw std::invalid_argument("RadialGrid: need at least 64 nodes");
    dim_ = N;
    R_ = R;
    h_ = R / (n - 1);
    area_ = unit_sphere_area(N);

    radius_.resize(n);
    quad_w_.resize(n);
    measure_.resize(n);
    boundary_.assign(n, 0);
    boundary_[n - 1] = 1;
    for (int i = 0; i < n; ++i) {
        const double r = i * h_;
        radius_[i] = r;
        quad_w_[i] = area_ * std::pow(r, N - 1) * h_;
    }
    quad_w_[0] *= 0.5;      // zero anyway for N >= 2
    quad_w_[n - 1] *= 0.5;
    // Dual cells [r_i - h/2, r_i + h/2] clipped to [0, R].
    for (int i = 0; i < n; ++i) {
        const double lo = std::max(0.0, radius_[i] - 0.5 * h_);
        const double hi = std::min(R_, radius_[i] + 0.5 * h_);
        measure_[i] = area_ * (std::pow(hi, N) - std::pow(lo, N)) / N;
    }
    // Primal cells [r_i, r_{i+1}] carry the kinetic energy.
    links_.reserve(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        const double mu = area_ * (std::pow(radius_[i + 1], N) - std::pow(radius_[i], N)) / N;
        links_.push_back({i, i + 1, mu / (h_ * h_)});
    }
}

std::array<double, 3> RadialGrid::node_position(int i) const {
    return {radius_[i], 0.0, 0.0};
}

void RadialGrid::laplacian(std::span<const double> f, std::span<double> out) const {
    const int n = node_count();
    if (static_cast<int>(f.size()) != n || static_cast<int>(out.size()) != n)
        throw std::invalid_argument("RadialGrid::laplacian: size mismatch");
    const double h2 = h_ * h_;
    // Symmetry at the origin (f'(0) = 0, ghost f_{-1} = f_1):
    // lap f(0) = 2N (f_1 - f_0)/h^2.
    out[0] = 2.0 * dim_ * (f[1] - f[0]) / h2;
    for (int i = 1; i + 1 < n; ++i) {
        const double second = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
        const double first = (f[i + 1] - f[i - 1]) / (2.0 * h_);
        out[i] = second + (dim_ - 1) / radius_[i] * first;
    }
    out[n - 1] = 0.0;
}

void RadialGrid::gradient_sq(std::span<const double> f, std::span<double> out) const {
    const int n = node_count();
    if (static_cast<int>(f.size()) != n || static_cast<int>(out.size()) != n)
        throw std::invalid_argument("RadialGrid::gradient_sq: size mismatch");
    out[0] = 0.0; // radial symmetry
    for (int i = 1; i + 1 < n; ++i) {
        const double d = (f[i + 1] - f[i - 1]) / (2.0 * h_);
        out[i] = d * d;
    }
    const double d = (f[n - 1] - f[n - 2]) / h_;
    out[n - 1] = d * d;
}

BoxGrid::BoxGrid(int d, double L, int m) {
    if (d != 2 && d != 3)
        throw std::invalid_argument("BoxGrid: dimension must be 2 or 3");
    if (!(L > 0.0) || !std::isfinite(L))
        throw std::invalid_argument("BoxGrid: half-width must be positive");
    if (m < 24) throw std::invalid_argument("BoxGrid: need at least 24 points per axis");
    dim_ = d;
    L_ = L;
    m_ = m;
    h_ = 2.0 * L / (m - 1);
    const int mz = (d == 3) ? m : 1;
    const int n = m * m * mz;

    radius_.resize(n);
    quad_w_.resize(n);
    measure_.resize(n);
    boundary_.assign(n, 0);
    const double cell = std::pow(h_, d);
    int id = 0;
    for (int iz = 0; iz < mz; ++iz)
        for (int iy = 0; iy < m; ++iy)
            for (int ix = 0; ix < m; ++ix, ++id) {
                const double x = -L + ix * h_;
                const double y = -L + iy * h_;
                const double zc = (d == 3) ? -L + iz * h_ : 0.0;
                radius_[id] = std::sqrt(x * x + y * y + zc * zc);
                bool bd = ix == 0 || ix == m - 1 || iy == 0 || iy == m - 1;
                if (d == 3) bd = bd || iz == 0 || iz == mz - 1;
                boundary_[id] = bd ? 1 : 0;
                double w = cell;
                if (ix == 0 || ix == m - 1) w *= 0.5;
                if (iy == 0 || iy == m - 1) w *= 0.5;
                if (d == 3 && (iz == 0 || iz == mz - 1)) w *= 0.5;
                quad_w_[id] = w;
                measure_[id] = cell;
            }
    const double wl = std::pow(h_, d) / (h_ * h_);
    for (int iz = 0; iz < mz; ++iz)
        for (int iy = 0; iy < m; ++iy)
            for (int ix = 0; ix < m; ++ix) {
                const int i0 = index(ix, iy, iz);
                if (ix + 1 < m) links_.push_back({i0, index(ix + 1, iy, iz), wl});
                if (iy + 1 < m) links_.push_back({i0, index(ix, iy + 1, iz), wl});
                if (d == 3 && iz + 1 < mz) links_.push_back({i0, index(ix, iy, iz + 1), wl});
            }
}

int BoxGrid::index(int ix, int iy, int iz) const {
    return (iz * m_ + iy) * m_ + ix;
}

std::array<double, 3> BoxGrid::node_position(int i) const {
    const int ix = i % m_;
    const int iy = (i / m_) % m_;
    const int iz = i / (m_ * m_);
    return {-L_ + ix * h_, -L_ + iy * h_, dim_ == 3 ? -L_ + iz * h_ : 0.0};
}

void BoxGrid::laplacian(std::span<const double> f, std::span<double> out) const {
    const int n = node_count();
    if (static_cast<int>(f.size()) != n || static_cast<int>(out.size()) != n)
        throw std::invalid_argument("BoxGrid::laplacian: size mismatch");
    const int mz = (dim_ == 3) ? m_ : 1;
    const double h2 = h_ * h_;
    for (int iz = 0; iz < mz; ++iz)
        for (int iy = 0; iy < m_; ++iy)
            for (int ix = 0; ix < m_; ++ix) {
                const int i = index(ix, iy, iz);
                if (boundary_[i]) { out[i] = 0.0; continue; }
                double acc = -2.0 * dim_ * f[i];
                acc += f[index(ix - 1, iy, iz)] + f[index(ix + 1, iy, iz)];
                acc += f[index(ix, iy - 1, iz)] + f[index(ix, iy + 1, iz)];
                if (dim_ == 3)
                    acc += f[index(ix, iy, iz - 1)] + f[index(ix, iy, iz + 1)];
                out[i] = acc / h2;
            }
}

void BoxGrid::gradient_sq(std::span<const double> f, std::span<double> out) const {
    const int n = node_count();
    if (static_cast<int>(f.size()) != n || static_cast<int>(out.size()) != n)
        throw std::invalid_argument("BoxGrid::gradient_sq: size mismatch");
    const int mz = (dim_ == 3) ? m_ : 1;
    auto axis_diff = [&](int lo, int i, int hi, int at, int last) {
        if (at == 0) return (f[hi] - f[i]) / h_;
        if (at == last) return (f[i] - f[lo]) / h_;
        return (f[hi] - f[lo]) / (2.0 * h_);
    };
    for (int iz = 0; iz < mz; ++iz)
        for (int iy = 0; iy < m_; ++iy)
            for (int ix = 0; ix < m_; ++ix) {
                const int i = index(ix, iy, iz);
                double gx = axis_diff(index(std::max(ix - 1, 0), iy, iz), i,
                                      index(std::min(ix + 1, m_ - 1), iy, iz), ix, m_ - 1);
                double gy = axis_diff(index(ix, std::max(iy - 1, 0), iz), i,
                                      index(ix, std::min(iy + 1, m_ - 1), iz), iy, m_ - 1);
                double g2 = gx * gx + gy * gy;
                if (dim_ == 3) {
                    double gz = axis_diff(index(ix, iy, std::max(iz - 1, 0)), i,
                                          index(ix, iy, std::min(iz + 1, mz - 1)), iz, mz - 1);
                    g2 += gz * gz;
                }
                out[i] = g2;
            }
}

} // namespace qlss
