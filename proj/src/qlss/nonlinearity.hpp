#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qlss {

struct MixedTerm {
    double b;     // coefficient
    double alpha; // exponent on u
    double beta;  // exponent on v; alpha + beta == p
};

// p-homogeneous coupling term
//   Q(u, v) = a u^p + sum_i b_i u^{alpha_i} v^{beta_i} + c v^p
// on the open first quadrant, extended by zero when u <= 0 or v <= 0.
// Powers are evaluated only for positive bases.  The zero extension keeps Q
// continuous iff both pure coefficients vanish; a nonzero a or c is accepted
// but flagged (continuity_warning) and later fails the axis conditions in
// check_hypotheses.
class HomogeneousQ {
public:
    HomogeneousQ(double p, double pure_u_coeff, double pure_v_coeff,
                 std::vector<MixedTerm> mixed, int dimension = 3);

    double value(double u, double v) const;

    struct Grad { double du, dv; };
    Grad grad(double u, double v) const;

    struct Hess { double duu, duv, dvv; };
    Hess hessian(double u, double v) const;

    // Limits of the gradient along the axes, computed term-wise from the
    // exponents (not numerically): grad as (u,v) -> (0+, t) and (s, 0+)
    // with the other variable held at 1.
    Grad grad_limit_on_v_axis() const; // (u,v) -> (0, 1)
    Grad grad_limit_on_u_axis() const; // (u,v) -> (1, 0)

    double p() const { return p_; }
    int dimension() const { return dim_; }
    double pure_u_coeff() const { return a_; }
    double pure_v_coeff() const { return c_; }
    const std::vector<MixedTerm>& mixed() const { return mixed_; }
    bool continuity_warning() const { return a_ != 0.0 || c_ != 0.0; }

    // Upper end of the admissible homogeneity range, 2 * 2N/(N-2)
    // (infinite when the dimension is 2).
    static double max_exponent(int dimension);

private:
    double p_;
    double a_, c_;
    std::vector<MixedTerm> mixed_;
    int dim_;
};

struct HypothesisReport {
    bool q0_homogeneity = false;   // exponent range + sampled p-homogeneity
    bool q1_growth = false;        // |grad Q| <= C (u^{p-1} + v^{p-1})
    bool q2_axis_u = false;        // Q_u -> 0 on the v-axis
    bool q3_axis_v = false;        // Q_u -> 0 on the u-axis (and symmetric)
    bool q4_positive = false;      // Q > 0 inside the quadrant
    bool q5_monotone = false;      // Q_u, Q_v >= 0 on the quadrant
    double euler_max_rel = 0.0;    // max relative defect of p Q = u Q_u + v Q_v
    double growth_constant = 0.0;  // smallest sampled C for q1
    bool continuity_warning = false;
    std::vector<std::string> notes;

    bool all_pass() const {
        return q0_homogeneity && q1_growth && q2_axis_u && q3_axis_v &&
               q4_positive && q5_monotone;
    }
    std::string to_json() const;
};

// Structural checks on the exponents plus sampled checks on random points of
// the open quadrant.  Deterministic for a fixed seed.
HypothesisReport check_hypotheses(const HomogeneousQ& q, int sample_count = 256,
                                  std::uint64_t seed = 77);

} // namespace qlss
