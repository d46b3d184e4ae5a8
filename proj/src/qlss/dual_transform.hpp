#pragma once

namespace qlss {

// Odd change of variables that removes the quasilinear term: the transform g
// solves g'(t) = 1 / sqrt(1 + 2 g(t)^2) on [0, inf), g(0) = 0, extended by
// g(-t) = -g(t).  Its inverse has the closed form
//   inverse(y) = y sqrt(1 + 2 y^2) / 2 + asinh(sqrt(2) y) / (2 sqrt(2)),
// which is what value() inverts with a safeguarded Newton iteration.
class DualTransform {
public:
    explicit DualTransform(double newton_tolerance = 1e-12,
                           double asymptotic_threshold = 1e8);

    // f(t).  Throws std::domain_error on non-finite input.
    double value(double t) const;
    // f'(t) = 1 / sqrt(1 + 2 f(t)^2); always in (0, 1].
    double derivative(double t) const;
    // f''(t) = -2 f(t) f'(t)^4.
    double second_derivative(double t) const;
    // Same derivatives, reusing an already computed f = value(t).
    static double derivative_from_value(double f);
    static double second_derivative_from_value(double f);
    // Closed-form inverse t(y); odd in y.
    double inverse(double y) const;

    double newton_tolerance() const { return tol_; }

private:
    double invert_nonnegative(double t) const;

    double tol_;
    double asym_;
};

} // namespace qlss
