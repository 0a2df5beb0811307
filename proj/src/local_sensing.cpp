#include "cssense/local_sensing.hpp"

#include "cssense/detail/bisect.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cssense {

namespace {

// Finds λ where a function strictly decreasing in λ, starting at 1 for λ = 0,
// crosses target.
template <typename F>
double invert_decreasing(F f, double target, double initial_hi) {
    double hi = initial_hi;
    while (f(hi) >= target) {
        hi *= 2.0;
        if (!std::isfinite(hi)) {
            throw std::domain_error("threshold search: no bracket found");
        }
    }
    const auto br = detail::bisect([&](double lambda) { return f(lambda) >= target; }, 0.0, hi);
    // Report whichever end of the final bracket is closer in value.
    return std::fabs(f(br.lo) - target) <= std::fabs(f(br.hi) - target) ? br.lo : br.hi;
}

void check_open_unit(Probability target, const char* name) {
    if (target.value() <= 0.0 || target.value() >= 1.0) {
        throw std::domain_error(std::string(name) + " must lie strictly inside (0, 1), got " +
                                std::to_string(target.value()));
    }
}

} // namespace

SensingParams::SensingParams(unsigned samples_m, double threshold_lambda, double avg_snr)
    : samples_m_(samples_m), threshold_lambda_(threshold_lambda), avg_snr_(avg_snr) {
    if (samples_m < 1) {
        throw std::invalid_argument("samples_m must be at least 1");
    }
    if (!(threshold_lambda >= 0.0) || !std::isfinite(threshold_lambda)) {
        throw std::invalid_argument("threshold_lambda must be finite and nonnegative, got " +
                                    std::to_string(threshold_lambda));
    }
    if (!(avg_snr > 0.0) || !std::isfinite(avg_snr)) {
        throw std::invalid_argument("avg_snr must be finite and positive, got " +
                                    std::to_string(avg_snr));
    }
}

SensingParams SensingParams::from_db(unsigned samples_m, double threshold_lambda, double avg_snr_db) {
    return SensingParams(samples_m, threshold_lambda, db_to_linear(avg_snr_db));
}

SensingParams SensingParams::with_threshold(double threshold_lambda) const {
    return SensingParams(samples_m_, threshold_lambda, avg_snr_);
}

double db_to_linear(double db) {
    return std::pow(10.0, db / 10.0);
}

Probability local_pf(const SensingParams& p) {
    return reg_upper_incomplete_gamma(p.samples(), p.threshold() / 2.0);
}

Probability local_pd(const SensingParams& p) {
    const unsigned m = p.samples();
    const double lambda = p.threshold();
    const double g = p.avg_snr();
    const double fade_decay = lambda / (2.0 + 2.0 * g);
    if (m == 1) {
        return Probability::clamped(std::exp(-fade_decay));
    }
    // e^{-λ/2}Σ_{l<M-1}(λ/2)^l/l! is Q(M-1, λ/2); the bracketed difference
    // collapses to e^{-λ/(2+2γ)}·P(M-1, λγ/(2+2γ)).
    const double noise_part = reg_upper_incomplete_gamma(m - 1, lambda / 2.0);
    const double lower = reg_lower_incomplete_gamma(m - 1, lambda * g / (2.0 + 2.0 * g));
    double fading_part = 0.0;
    if (lower > 0.0) {
        fading_part = std::exp((m - 1) * std::log1p(1.0 / g) - fade_decay + std::log(lower));
    }
    return Probability::clamped(noise_part + fading_part);
}

Probability local_pm(const SensingParams& p) {
    return local_pd(p).complement();
}

double threshold_for_pf(Probability target_pf, unsigned samples_m) {
    check_open_unit(target_pf, "target_pf");
    const SensingParams base(samples_m, 0.0, 1.0);
    return invert_decreasing(
        [&](double lambda) { return local_pf(base.with_threshold(lambda)).value(); },
        target_pf.value(), 2.0 * samples_m + 2.0);
}

double threshold_for_pd(Probability target_pd, unsigned samples_m, double avg_snr) {
    check_open_unit(target_pd, "target_pd");
    const SensingParams base(samples_m, 0.0, avg_snr);
    return invert_decreasing(
        [&](double lambda) { return local_pd(base.with_threshold(lambda)).value(); },
        target_pd.value(), 2.0 * samples_m + 2.0);
}

} // namespace cssense
