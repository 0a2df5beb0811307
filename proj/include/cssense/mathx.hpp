#ifndef CSSENSE_MATHX_HPP
#define CSSENSE_MATHX_HPP

#include <compare>

namespace cssense {

/// A probability value, guaranteed to lie in [0, 1].
///
/// Construction from NaN or an out-of-range value throws std::domain_error.
class Probability {
public:
    constexpr Probability() noexcept = default;
    explicit Probability(double value);

    /// Clamps tiny rounding excursions (|excess| <= 1e-12) back into [0, 1]
    /// before validating. Intended for results of closed-form sums.
    static Probability clamped(double value);

    constexpr double value() const noexcept { return value_; }
    constexpr operator double() const noexcept { return value_; }

    Probability complement() const noexcept;

    friend constexpr auto operator<=>(Probability, Probability) noexcept = default;

private:
    double value_ = 0.0;
};

/// Regularized upper incomplete gamma Γ(a, x)/Γ(a).
///
/// Series expansion below x = a + 1, Lentz continued fraction above.
/// Throws std::domain_error for a <= 0 or x < 0.
Probability reg_upper_incomplete_gamma(double a, double x);

/// Regularized lower incomplete gamma γ(a, x)/Γ(a), the complement of the
/// upper one but computed directly so small values keep relative accuracy.
Probability reg_lower_incomplete_gamma(double a, double x);

/// Gaussian tail Pr{N(0,1) > x}.
///
/// For finite x the result never underflows to exactly zero: values below
/// the double range are reported as the smallest positive denormal.
Probability gaussian_q(double x);

/// Natural log of the binomial coefficient C(k_total, i).
double log_binomial(unsigned k_total, unsigned i);

/// Σ_{i=lo}^{hi} C(n, i)·a^i·b^(n−i), with a^0 = b^0 = 1 even for zero
/// bases. Terms are formed in the log domain and added smallest first.
double binomial_weighted_sum(unsigned n, unsigned lo, unsigned hi, double a, double b);

} // namespace cssense

#endif // CSSENSE_MATHX_HPP
