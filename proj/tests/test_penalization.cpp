#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qlss/penalization.hpp"
#include "qlss/rng.hpp"

#include <cmath>
#include <stdexcept>

using qlss::CutoffEta;
using qlss::HomogeneousQ;
using qlss::OmegaRegion;
using qlss::PenalizedH;
using qlss::Rng;

namespace {

HomogeneousQ cubic_cross() {
    return HomogeneousQ(6.0, 0.0, 0.0, {{1.0, 3.0, 3.0}});
}

// Independent route to the majorant coefficient: dense scan of
// Q(r cos, r sin)/r^2 over the annulus [a, 5a], no homogeneity shortcut.
double majorant_by_scan(const HomogeneousQ& q, double a) {
    double best = 0.0;
    const int nr = 400, na = 2000;
    for (int i = 0; i <= nr; ++i) {
        const double r = a + (5.0 * a - a) * i / nr;
        for (int j = 0; j <= na; ++j) {
            const double th = 2.0 * M_PI * j / na;
            const double val = q.value(r * std::cos(th), r * std::sin(th)) / (r * r);
            best = std::max(best, val);
        }
    }
    return best;
}

} // namespace

TEST_CASE("cutoff is a C1 bridge from 1 to 0") {
    CutoffEta eta(0.5);
    CHECK(eta.value(0.0) == 1.0);
    CHECK(eta.value(0.5) == 1.0);
    CHECK(eta.value(2.5) == 0.0);
    CHECK(eta.value(10.0) == 0.0);
    CHECK(eta.derivative(0.3) == 0.0);
    CHECK(eta.derivative(3.0) == 0.0);
    CHECK(eta.value(1.5) == doctest::Approx(0.5)); // midpoint of the bridge

    // Derivative matches central differences across the bridge and the seams.
    for (double s : {0.6, 1.0, 1.5, 2.0, 2.4, 0.5 + 1e-7, 2.5 - 1e-7}) {
        const double h = 1e-6;
        const double fd = (eta.value(s + h) - eta.value(s - h)) / (2 * h);
        CHECK(eta.derivative(s) == doctest::Approx(fd).epsilon(1e-4));
    }
    // Slope bound 3/(8a).
    double max_slope = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double s = 0.5 + 2.0 * i / 1000.0;
        max_slope = std::max(max_slope, std::fabs(eta.derivative(s)));
    }
    CHECK(max_slope <= 3.0 / (8.0 * 0.5) + 1e-12);
    CHECK(max_slope == doctest::Approx(3.0 / (8.0 * 0.5)).epsilon(1e-4));

    CHECK_THROWS_AS(CutoffEta(0.0), std::invalid_argument);
    CHECK_THROWS_AS(CutoffEta(-1.0), std::invalid_argument);
}

TEST_CASE("region membership and inradius") {
    auto ball = OmegaRegion::ball(2.0);
    CHECK(ball.contains({1.0, 1.0, 1.0}, 3));
    CHECK_FALSE(ball.contains({2.0, 1.0, 0.0}, 3));
    CHECK(ball.inradius(3) == 2.0);

    auto box = OmegaRegion::box({1.0, 2.0, 3.0});
    CHECK(box.contains({0.9, -1.9, 2.9}, 3));
    CHECK_FALSE(box.contains({1.1, 0.0, 0.0}, 3));
    CHECK(box.inradius(3) == 1.0);
    // In dimension 2 the third half-width is ignored.
    auto flat = OmegaRegion::box({1.0, 2.0, 0.1});
    CHECK(flat.inradius(2) == 1.0);
    CHECK(flat.contains({0.5, 1.5, 99.0}, 2));
}

TEST_CASE("majorant coefficient matches a dense angular scan") {
    auto q = cubic_cross();
    for (double a : {0.0625, 0.125, 0.5}) {
        const double ref = majorant_by_scan(q, a);
        CHECK(qlss::compute_A(q, a) == doctest::Approx(ref).epsilon(1e-6));
    }
    // Closed form for the cross-cubic: angular max of (cos sin)^3 is 1/8,
    // radial factor (5a)^4.
    CHECK(qlss::compute_A(q, 0.125) ==
          doctest::Approx(std::pow(0.625, 4) / 8.0).epsilon(1e-10));
    CHECK(qlss::compute_A(q, 0.0625) ==
          doctest::Approx(625.0 / 524288.0).epsilon(1e-10));
}

TEST_CASE("threshold selection meets the smallness condition with margin") {
    auto q = cubic_cross();
    const double a = qlss::choose_a(q, 1.0, 1.0);
    CHECK(a == 0.0625); // dyadic ladder, halved once for margin
    CHECK(qlss::compute_A(q, a) < 0.25);
    // The doubled threshold must still satisfy the raw inequality (margin
    // came from halving an admissible value).
    CHECK(qlss::compute_A(q, 2.0 * a) < 0.25);
    // Deterministic.
    CHECK(qlss::choose_a(q, 1.0, 1.0) == a);
    // Smaller floors force smaller thresholds.
    CHECK(qlss::choose_a(q, 0.1, 0.1) < a);
    CHECK_THROWS_AS(qlss::choose_a(q, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("penalized coupling: plateau passthrough is bitwise") {
    auto q = cubic_cross();
    const double a = 0.0625;
    PenalizedH H(q, a, OmegaRegion::ball(10.0), 1.0, 1.0);
    CHECK(H.smallness_ok());
    CHECK(H.k() == doctest::Approx(6.0)); // 4p/(p-2) at p = 6

    Rng rng(8);
    for (int i = 0; i < 400; ++i) {
        const double th = rng.uniform(0.0, 2.0 * M_PI);
        const double r = rng.uniform(0.0, a);
        const double s = r * std::cos(th), t = r * std::sin(th);
        CHECK(H.value(false, s, t) == q.value(s, t));
        auto hg = H.grad(false, s, t);
        auto qg = q.grad(s, t);
        CHECK(hg.du == qg.du);
        CHECK(hg.dv == qg.dv);
    }
    // Inside the region the coupling is untouched at any amplitude.
    CHECK(H.value(true, 3.0, 4.0) == q.value(3.0, 4.0));
    // Far branch is the pure quadratic majorant.
    const double r = 6.0 * a;
    CHECK(H.value(false, r, 0.0) == doctest::Approx(H.A() * r * r));
    CHECK(H.value(false, 0.0, r) == doctest::Approx(H.A() * r * r));
}

TEST_CASE("penalized coupling is C1 across both seams") {
    auto q = cubic_cross();
    const double a = 0.0625;
    PenalizedH H(q, a, OmegaRegion::ball(10.0), 1.0, 1.0);
    Rng rng(21);
    for (double seam : {a, 5.0 * a}) {
        for (int i = 0; i < 50; ++i) {
            const double th = rng.uniform(0.05, M_PI / 2 - 0.05);
            const double c = std::cos(th), s = std::sin(th);
            const double h = 1e-6 * a;
            // Value continuity across the seam radius.
            const double below = H.value(false, (seam - h) * c, (seam - h) * s);
            const double above = H.value(false, (seam + h) * c, (seam + h) * s);
            CHECK(std::fabs(above - below) <= 1e-4 * std::max(1.0, std::fabs(below)));
            // Gradient continuity.
            auto gb = H.grad(false, (seam - h) * c, (seam - h) * s);
            auto ga = H.grad(false, (seam + h) * c, (seam + h) * s);
            CHECK(std::fabs(ga.du - gb.du) <= 1e-4 * std::max(1.0, std::fabs(gb.du)));
            CHECK(std::fabs(ga.dv - gb.dv) <= 1e-4 * std::max(1.0, std::fabs(gb.dv)));
            // Analytic gradient matches central differences at the seam.
            const double d = 2e-7;
            const double x = seam * c, y = seam * s;
            auto g = H.grad(false, x, y);
            const double fdu = (H.value(false, x + d, y) - H.value(false, x - d, y)) / (2 * d);
            const double fdv = (H.value(false, x, y + d) - H.value(false, x, y - d)) / (2 * d);
            CHECK(g.du == doctest::Approx(fdu).epsilon(1e-4));
            CHECK(g.dv == doctest::Approx(fdv).epsilon(1e-4));
        }
    }
}

TEST_CASE("sampled bound report is clean at the chosen threshold") {
    auto q = cubic_cross();
    const double a = qlss::choose_a(q, 1.0, 1.0);
    PenalizedH H(q, a, OmegaRegion::ball(10.0), 1.0, 1.0);
    auto rep = qlss::verify_H_bounds(H, 10000, 99);
    CHECK(rep.samples == 10000);
    CHECK(rep.h1_violations == 0);
    CHECK(rep.h2_violations == 0);
    CHECK(rep.h3_growth_violations == 0);
    CHECK(rep.h3_derivative_violations == 0);
    CHECK(rep.h1_max_rel <= 1e-9);
    CHECK(rep.far_branch_scale_ok);
    CHECK(rep.smallness_ok);
    CHECK(rep.all_ok());
    CHECK_FALSE(rep.to_json().empty());

    // An oversized threshold breaks the smallness condition and the growth
    // bounds; the report must say so rather than throw.
    PenalizedH bad(q, 16.0 * a, OmegaRegion::ball(10.0), 1.0, 1.0);
    CHECK_FALSE(bad.smallness_ok());
    auto brep = qlss::verify_H_bounds(bad, 4000, 99);
    CHECK_FALSE(brep.all_ok());
    CHECK(brep.h3_growth_violations + brep.h3_derivative_violations > 0);
}

TEST_CASE("constructor validation") {
    auto q = cubic_cross();
    CHECK_THROWS_AS(PenalizedH(q, -0.1, OmegaRegion::ball(1.0), 1.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(PenalizedH(q, 0.1, OmegaRegion::ball(1.0), -1.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(OmegaRegion::ball(-2.0), std::invalid_argument);
    CHECK_THROWS_AS(OmegaRegion::box({1.0, -1.0, 1.0}), std::invalid_argument);
}
