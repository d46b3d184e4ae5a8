#include "qlss/dual_transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlss {

namespace {
const double kSqrt2 = std::sqrt(2.0);
const double kRoot4of2 = std::pow(2.0, 0.25);
} // namespace

DualTransform::DualTransform(double newton_tolerance, double asymptotic_threshold)
    : tol_(newton_tolerance), asym_(asymptotic_threshold) {
    if (!(tol_ > 0.0) || !std::isfinite(tol_))
        throw std::invalid_argument("DualTransform: newton_tolerance must be positive");
    if (!(asym_ > 1.0))
        throw std::invalid_argument("DualTransform: asymptotic_threshold must exceed 1");
}

double DualTransform::inverse(double y) const {
    if (!std::isfinite(y))
        throw std::domain_error("DualTransform::inverse: non-finite argument");
    const double a = std::fabs(y);
    const double t = a * std::sqrt(1.0 + 2.0 * a * a) / 2.0
                   + std::asinh(kSqrt2 * a) / (2.0 * kSqrt2);
    return std::copysign(t, y);
}

double DualTransform::invert_nonnegative(double t) const {
    // Monotone problem inverse(y) = t on y >= 0; both |y| <= |t| and
    // |y| <= 2^{1/4} sqrt(|t|) are upper bounds, so they bracket the root.
    if (t == 0.0) return 0.0;
    double hi = std::min(t, kRoot4of2 * std::sqrt(t));
    double lo = 0.0;
    double y = (t > asym_) ? kRoot4of2 * std::sqrt(t) : std::min(t, 0.75 * hi);
    y = std::clamp(y, lo, hi);

    const double tol = tol_ * std::max(1.0, t);
    for (int it = 0; it < 80; ++it) {
        const double r = inverse(y) - t;
        if (std::fabs(r) <= tol) return y;
        if (r > 0.0) hi = y; else lo = y;
        const double step = r / std::sqrt(1.0 + 2.0 * y * y);
        double next = y - step;
        if (!(next > lo) || !(next < hi))
            next = 0.5 * (lo + hi);
        if (next == y) return y; // stuck at double resolution
        y = next;
    }
    return y;
}

double DualTransform::value(double t) const {
    if (!std::isfinite(t))
        throw std::domain_error("DualTransform::value: non-finite argument");
    const double y = invert_nonnegative(std::fabs(t));
    return std::copysign(y, t);
}

double DualTransform::derivative_from_value(double f) {
    return 1.0 / std::sqrt(1.0 + 2.0 * f * f);
}

double DualTransform::second_derivative_from_value(double f) {
    const double d = derivative_from_value(f);
    const double d2 = d * d;
    return -2.0 * f * d2 * d2;
}

double DualTransform::derivative(double t) const {
    return derivative_from_value(value(t));
}

double DualTransform::second_derivative(double t) const {
    return second_derivative_from_value(value(t));
}

} // namespace qlss
