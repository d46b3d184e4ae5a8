#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qlss/functional.hpp"
#include "qlss/rng.hpp"

#include <cmath>
#include <stdexcept>

using namespace qlss;

namespace {

struct Fixture {
    RadialGrid grid{3, 20.0, 200};
    DualTransform f;
    HomogeneousQ q{6.0, 0.0, 0.0, {{1.0, 3.0, 3.0}}};
    PenalizedH h{q, 0.0625, OmegaRegion::ball(10.0), 1.0, 1.0};
    PotentialSpec W = PotentialSpec::constant(1.0);
    PotentialSpec V = PotentialSpec::constant(1.0);

    FunctionalContext penalized(double eps = 1.0) const {
        return FunctionalContext::penalized(grid, f, h, W, V, eps);
    }
    FunctionalContext raw(double eps = 1.0) const {
        return FunctionalContext::raw(grid, f, q, W, V, eps);
    }
};

// Smooth two-component bump with amplitude s, vanishing on the boundary.
StatePair bump_state(const Grid& g, double s, double width = 3.0) {
    StatePair st(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) {
        if (g.is_boundary(i)) continue;
        const double r = g.node_radius()[i];
        st.w[i] = s * std::exp(-r * r / (width * width));
        st.z[i] = 0.8 * s * std::exp(-r * r / (width * width));
    }
    return st;
}

StatePair random_state(const Grid& g, Rng& rng, double amp) {
    StatePair st(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) {
        if (g.is_boundary(i)) continue;
        st.w[i] = rng.symmetric(amp);
        st.z[i] = rng.symmetric(amp);
    }
    return st;
}

} // namespace

TEST_CASE("gradient is the exact differential of the energy") {
    Fixture fx;
    auto ctx = fx.penalized();
    Rng rng(123);
    for (int trial = 0; trial < 20; ++trial) {
        auto s = random_state(fx.grid, rng, 1.5);
        auto d = random_state(fx.grid, rng, 1.0);
        StatePair g;
        phi_grad(ctx, s, g);
        const double directional = inner(ctx, g, d);

        const double h = 1e-6;
        auto sp = s, sm = s;
        for (int i = 0; i < s.size(); ++i) {
            sp.w[i] += h * d.w[i];
            sp.z[i] += h * d.z[i];
            sm.w[i] -= h * d.w[i];
            sm.z[i] -= h * d.z[i];
        }
        const double fd = (phi(ctx, sp) - phi(ctx, sm)) / (2 * h);
        CHECK(directional ==
              doctest::Approx(fd).epsilon(1e-5).scale(std::fabs(fd) + 1.0));
    }
}

TEST_CASE("strong-form residual assembly reproduces the gradient") {
    Fixture fx;
    auto ctx = fx.penalized(0.5);
    Rng rng(7);
    auto s = random_state(fx.grid, rng, 2.0);
    StatePair g, r;
    phi_grad(ctx, s, g);
    residual_aux(ctx, s, r);
    for (int i = 0; i < s.size(); ++i) {
        CHECK(r.w[i] == doctest::Approx(g.w[i]).epsilon(1e-13));
        CHECK(r.z[i] == doctest::Approx(g.z[i]).epsilon(1e-13));
    }
}

TEST_CASE("penalized energy equals the raw energy on plateau states") {
    Fixture fx;
    auto pen = fx.penalized();
    auto raw = fx.raw();
    // Amplitude below the plateau threshold everywhere outside the region
    // (here: everywhere), so the couplings agree exactly.
    auto s = bump_state(fx.grid, 0.05);
    CHECK(phi(pen, s) == doctest::Approx(phi(raw, s)).epsilon(1e-15));
    CHECK(i_eps(pen, s) == doctest::Approx(phi(pen, s)).epsilon(1e-15));

    // Large amplitude inside the region only: still identical (the cap only
    // acts outside).  The bump at width 3 is ~1e-5 of its peak at r = 10.
    auto big = bump_state(fx.grid, 1.0, 1.5);
    CHECK(i_eps(pen, big) == doctest::Approx(phi(pen, big)).epsilon(1e-12));

    // A state that is large outside the region sees different couplings.
    StatePair wide = bump_state(fx.grid, 2.0, 14.0);
    CHECK(std::fabs(phi(pen, wide) - i_eps(pen, wide)) > 1e-6);
}

TEST_CASE("norms and inner products are consistent") {
    Fixture fx;
    auto ctx = fx.penalized();
    Rng rng(55);
    auto a = random_state(fx.grid, rng, 1.0);
    auto b = random_state(fx.grid, rng, 1.0);
    CHECK(inner(ctx, a, b) == doctest::Approx(inner(ctx, b, a)).epsilon(1e-14));
    CHECK(grad_norm(ctx, a) ==
          doctest::Approx(std::sqrt(inner(ctx, a, a))).epsilon(1e-14));

    // Linearity in the first slot.
    auto s = a;
    for (int i = 0; i < s.size(); ++i) {
        s.w[i] = 2.0 * a.w[i];
        s.z[i] = 2.0 * a.z[i];
    }
    CHECK(inner(ctx, s, b) == doctest::Approx(2.0 * inner(ctx, a, b)).epsilon(1e-13));
}

TEST_CASE("x-norm against a closed-form Gaussian") {
    Fixture fx;
    auto ctx = fx.penalized();
    // w = exp(-r^2/2), z = w/2, W = V = 1:
    // int |grad w|^2 + w^2 = (3/2 + 1) pi^{3/2}; z contributes a quarter.
    StatePair s(fx.grid.node_count());
    for (int i = 0; i < fx.grid.node_count(); ++i) {
        if (fx.grid.is_boundary(i)) continue;
        const double r = fx.grid.node_radius()[i];
        s.w[i] = std::exp(-r * r / 2.0);
        s.z[i] = 0.5 * s.w[i];
    }
    // Reference 17.4010249900990870 from 30-digit quadrature.
    CHECK(x_norm_sq(ctx, s) == doctest::Approx(17.40102499).epsilon(2e-3));

    // Sphere functional is dominated by the x-norm (|f(t)| <= |t|) and
    // approaches it for small amplitudes (f(t) ~ t).
    CHECK(psi(ctx, s) <= x_norm_sq(ctx, s));
    auto tiny = bump_state(fx.grid, 1e-3);
    CHECK(psi(ctx, tiny) ==
          doctest::Approx(x_norm_sq(ctx, tiny)).epsilon(1e-3));
}

TEST_CASE("rescaling lands on the sphere") {
    Fixture fx;
    auto ctx = fx.penalized();
    auto s = bump_state(fx.grid, 2.0);
    StatePair out;
    for (double rho : {0.1, 0.3, 2.0}) {
        const double t = rescale_to_sphere(ctx, s, rho, out);
        CHECK(t > 0.0);
        CHECK(psi(ctx, out) == doctest::Approx(rho * rho).epsilon(1e-9));
        for (int i = 0; i < s.size(); ++i) {
            CHECK(out.w[i] == t * s.w[i]);
        }
    }
    // Monotone in rho for a fixed state.
    StatePair o1, o2;
    const double t1 = rescale_to_sphere(ctx, s, 0.1, o1);
    const double t2 = rescale_to_sphere(ctx, s, 1.0, o2);
    CHECK(t1 < t2);

    StatePair zero(fx.grid.node_count());
    CHECK_THROWS_AS(rescale_to_sphere(ctx, zero, 0.3, out), std::invalid_argument);
    CHECK_THROWS_AS(rescale_to_sphere(ctx, s, 0.0, out), std::invalid_argument);
}

TEST_CASE("scale parameter domain and potential sampling") {
    Fixture fx;
    CHECK_THROWS_AS(fx.penalized(0.0), std::invalid_argument);
    CHECK_THROWS_AS(fx.penalized(1.5), std::invalid_argument);
    CHECK_THROWS_AS(fx.penalized(-1.0), std::invalid_argument);
    CHECK_NOTHROW(fx.penalized(1.0));
    CHECK_NOTHROW(fx.penalized(1e-3));

    // The region membership uses the slow variable eps * x.
    auto c1 = fx.penalized(1.0);
    auto c2 = fx.penalized(0.5);
    int in1 = 0, in2 = 0;
    for (int i = 0; i < fx.grid.node_count(); ++i) {
        in1 += c1.inside_omega()[i];
        in2 += c2.inside_omega()[i];
    }
    CHECK(in2 > in1); // shrinking eps inflates the region in fast coordinates

    // Bump potential sampled in the slow variable too.
    Fixture fb;
    fb.W = PotentialSpec::class2_bump(1.0);
    auto cb = fb.penalized(0.5);
    const double r7 = fb.grid.node_radius()[7];
    CHECK(cb.W()[7] ==
          doctest::Approx(1.0 + 1.0 - std::exp(-0.25 * r7 * r7)).epsilon(1e-13));
    CHECK(cb.V()[7] == 1.0);
}

TEST_CASE("energy splits into quadratic and coupling parts") {
    Fixture fx;
    auto ctx = fx.penalized();
    // With the coupling removed by zero amplitude in one component, phi is
    // the quadratic part of the other: no Q contribution (truncation).
    StatePair s(fx.grid.node_count());
    for (int i = 0; i < fx.grid.node_count(); ++i) {
        if (fx.grid.is_boundary(i)) continue;
        const double r = fx.grid.node_radius()[i];
        s.w[i] = 0.02 * std::exp(-r * r / 9.0);
    }
    const double e = phi(ctx, s);
    // Small amplitude: f(w) ~ w, so phi ~ x_norm/2.
    CHECK(e == doctest::Approx(0.5 * x_norm_sq(ctx, s)).epsilon(1e-3));
    CHECK(e > 0.0);
}
