#include "cssense/mathx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cssense {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
constexpr int kMaxIterations = 10000;

void check_gamma_args(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw std::domain_error("incomplete gamma: shape must be positive and finite, got " +
                                std::to_string(a));
    }
    if (!(x >= 0.0) || std::isnan(x)) {
        throw std::domain_error("incomplete gamma: argument must be nonnegative, got " +
                                std::to_string(x));
    }
}

// log of x^a e^-x / Γ(a), the common prefactor of both expansions.
double log_prefactor(double a, double x) {
    return a * std::log(x) - x - std::lgamma(a);
}

// P(a, x) by power series; converges quickly for x < a + 1.
double lower_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < kMaxIterations; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) {
            break;
        }
    }
    return std::exp(log_prefactor(a, x) + std::log(sum));
}

// Q(a, x) by modified Lentz evaluation of the Legendre continued fraction.
double upper_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) {
            d = kTiny;
        }
        c = b + an / c;
        if (std::fabs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) {
            break;
        }
    }
    return std::exp(log_prefactor(a, x) + std::log(h));
}

} // namespace

Probability::Probability(double value) : value_(value) {
    if (std::isnan(value) || value < 0.0 || value > 1.0) {
        throw std::domain_error("probability out of [0, 1]: " + std::to_string(value));
    }
}

Probability Probability::clamped(double value) {
    if (value < 0.0 && value >= -1e-12) {
        return Probability(0.0);
    }
    if (value > 1.0 && value <= 1.0 + 1e-12) {
        return Probability(1.0);
    }
    return Probability(value);
}

Probability Probability::complement() const noexcept {
    Probability p;
    p.value_ = 1.0 - value_;
    return p;
}

Probability reg_upper_incomplete_gamma(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) {
        return Probability(1.0);
    }
    if (std::isinf(x)) {
        return Probability(0.0);
    }
    if (x < a + 1.0) {
        return Probability::clamped(1.0 - lower_series(a, x));
    }
    return Probability::clamped(upper_fraction(a, x));
}

Probability reg_lower_incomplete_gamma(double a, double x) {
    check_gamma_args(a, x);
    if (x == 0.0) {
        return Probability(0.0);
    }
    if (std::isinf(x)) {
        return Probability(1.0);
    }
    if (x < a + 1.0) {
        return Probability::clamped(lower_series(a, x));
    }
    return Probability::clamped(1.0 - upper_fraction(a, x));
}

Probability gaussian_q(double x) {
    if (!std::isfinite(x)) {
        throw std::domain_error("gaussian_q: argument must be finite");
    }
    const double q = 0.5 * std::erfc(x / std::sqrt(2.0));
    if (q == 0.0) {
        return Probability(std::numeric_limits<double>::denorm_min());
    }
    return Probability::clamped(q);
}

double log_binomial(unsigned k_total, unsigned i) {
    if (i > k_total) {
        throw std::domain_error("log_binomial: i = " + std::to_string(i) + " exceeds k_total = " +
                                std::to_string(k_total));
    }
    const unsigned r = std::min(i, k_total - i);
    // log C(K, r) = Σ_{j=1}^{r} log((K − r + j) / j); every ratio is >= 1.
    double acc = 0.0;
    for (unsigned j = 1; j <= r; ++j) {
        acc += std::log(static_cast<double>(k_total - r + j) / static_cast<double>(j));
    }
    return acc;
}

double binomial_weighted_sum(unsigned n, unsigned lo, unsigned hi, double a, double b) {
    if (hi > n) {
        hi = n;
    }
    if (lo > hi) {
        return 0.0;
    }
    const double log_a = std::log(a);
    const double log_b = std::log(b);
    std::vector<double> logs;
    logs.reserve(hi - lo + 1);
    for (unsigned i = lo; i <= hi; ++i) {
        const unsigned rest = n - i;
        if ((i > 0 && a == 0.0) || (rest > 0 && b == 0.0)) {
            continue;
        }
        double t = log_binomial(n, i);
        if (i > 0) {
            t += i * log_a;
        }
        if (rest > 0) {
            t += rest * log_b;
        }
        logs.push_back(t);
    }
    if (logs.empty()) {
        return 0.0;
    }
    std::sort(logs.begin(), logs.end());
    const double peak = logs.back();
    double scaled = 0.0;
    for (double t : logs) {
        scaled += std::exp(t - peak);
    }
    return std::exp(peak) * scaled;
}

} // namespace cssense
