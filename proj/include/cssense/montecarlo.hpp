#ifndef CSSENSE_MONTECARLO_HPP
#define CSSENSE_MONTECARLO_HPP

#include "cssense/fusion.hpp"
#include "cssense/local_sensing.hpp"
#include "cssense/reporting.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace cssense {

/// Full sensing chain to simulate: K radios with identical detectors and
/// reporting links, one fusion rule, a trial budget and a seed.
struct SimScenario {
    SensingParams sensing;
    ReportChannel channel;
    FusionConfig fusion;
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
};

/// Execution knobs that never change results.
struct SimOptions {
    /// Worker threads; 0 picks the hardware concurrency.
    unsigned threads = 1;
};

/// Raw event counts behind a SimResult.
struct SimCounts {
    std::uint64_t trials_h0 = 0;
    std::uint64_t trials_h1 = 0;
    std::uint64_t fused_false_alarms = 0;
    std::uint64_t fused_misses = 0;
    std::uint64_t local_false_alarms = 0;
    std::uint64_t local_misses = 0;
    std::uint64_t report_errors = 0;
    std::uint64_t report_bits = 0;
};

struct SimResult {
    double lambda = 0.0;
    /// Empirical Q̂_f (over noise-only trials) and Q̂_m (over active trials)
    /// with standard errors √(p̂(1−p̂)/N).
    PerfPoint fused;
    /// Pooled over radios.
    Probability per_radio_pf_hat;
    Probability per_radio_pm_hat;
    Probability report_error_rate_hat;
    SimCounts counts;
};

/// Simulates s.trials sensing events at the scenario's threshold.
///
/// Each trial picks a hypothesis with probability ½. Under the active
/// hypothesis every radio draws a block-fading total SNR γᵢ ~ Exp(mean γ̄)
/// and receives M samples hᵢ·x(n) + ηᵢ(n) with |x(n)| = 1, unit-variance
/// circular Gaussian noise and M·|hᵢ|² = γᵢ. Radios decide on
/// T = 2·Σ|r(n)|² ≥ λ, send the bit over d + N(0, σ²) sliced at 0.5, and the
/// fusion center applies the n-out-of-K vote.
///
/// Identical (scenario, seed) pairs give bit-identical results for any
/// SimOptions. Throws std::invalid_argument for zero trials.
SimResult run_sim(const SimScenario& s, SimOptions opts = {});

/// One SimResult per threshold, reusing the same random draws for every λ
/// (common random numbers). The scenario's own threshold is ignored.
/// Throws std::invalid_argument unless lambdas is non-empty and strictly
/// increasing with nonnegative entries.
std::vector<SimResult> run_sweep(const SimScenario& base, std::span<const double> lambdas,
                                 SimOptions opts = {});

enum class Hypothesis { noise_only, primary_active };

/// Draws `count` independent energy statistics from the same generator the
/// chain simulation uses. The threshold in `sensing` is ignored.
std::vector<double> sample_statistic(const SensingParams& sensing, Hypothesis h, std::uint64_t count,
                                     std::uint64_t seed);

/// Outcome of sending random bits over one reporting link.
struct LinkStats {
    std::uint64_t zeros_sent = 0;
    std::uint64_t ones_sent = 0;
    std::uint64_t zero_to_one = 0;
    std::uint64_t one_to_zero = 0;

    std::uint64_t transmissions() const noexcept { return zeros_sent + ones_sent; }
    std::uint64_t errors() const noexcept { return zero_to_one + one_to_zero; }
    double error_rate() const noexcept;
};

/// Sends `transmissions` equiprobable bits through d + N(0, σ²) and the
/// midpoint slicer.
LinkStats simulate_report_link(const ReportChannel& ch, std::uint64_t transmissions, std::uint64_t seed);

/// √(p(1−p)/n); zero when n is zero.
double binomial_stderr(double p, std::uint64_t n);

} // namespace cssense

#endif // CSSENSE_MONTECARLO_HPP
