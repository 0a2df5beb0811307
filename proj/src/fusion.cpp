#include "cssense/fusion.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace cssense {

FusionConfig::FusionConfig(unsigned num_radios_k, unsigned vote_threshold_n)
    : k_(num_radios_k), n_(vote_threshold_n) {
    if (num_radios_k < 1) {
        throw std::invalid_argument("num_radios_k must be at least 1");
    }
    if (vote_threshold_n < 1 || vote_threshold_n > num_radios_k) {
        throw std::invalid_argument("vote_threshold_n must lie in [1, " + std::to_string(num_radios_k) +
                                    "], got " + std::to_string(vote_threshold_n));
    }
}

Probability fused_qf(const FusionConfig& cfg, Probability pf, Probability pe) {
    const unsigned k = cfg.radios();
    const double reads_zero = (1.0 - pf) * (1.0 - pe) + pf * pe;
    const double reads_one = pf * (1.0 - pe) + (1.0 - pf) * pe;
    return Probability::clamped(
        binomial_weighted_sum(k, 0, k - cfg.vote_threshold(), reads_zero, reads_one));
}

Probability fused_qm(const FusionConfig& cfg, Probability pm, Probability pe) {
    const unsigned k = cfg.radios();
    const double reads_zero = pm * (1.0 - pe) + (1.0 - pm) * pe;
    const double reads_one = (1.0 - pm) * (1.0 - pe) + pm * pe;
    return Probability::clamped(
        binomial_weighted_sum(k, k - cfg.vote_threshold() + 1, k, reads_zero, reads_one));
}

Probability asymptotic_qf(const FusionConfig& cfg, Probability pe) {
    return fused_qf(cfg, Probability(0.0), pe);
}

Probability asymptotic_qm(const FusionConfig& cfg, Probability pe) {
    return fused_qm(cfg, Probability(0.0), pe);
}

Probability enumerate_rule(const FusionConfig& cfg, Probability p_assert, Probability pe) {
    const unsigned k = cfg.radios();
    if (k > 20) {
        throw std::invalid_argument("enumerate_rule supports at most 20 radios, got " +
                                    std::to_string(k));
    }
    // Per-bit received distribution from the four (sent, flipped) cases.
    const double sent[2] = {1.0 - p_assert, p_assert.value()};
    const double flip[2] = {1.0 - pe, pe.value()};
    double received[2] = {0.0, 0.0};
    for (int d = 0; d < 2; ++d) {
        for (int f = 0; f < 2; ++f) {
            received[d ^ f] += sent[d] * flip[f];
        }
    }

    double total = 0.0;
    const std::uint32_t vectors = 1u << k;
    for (std::uint32_t v = 0; v < vectors; ++v) {
        if (static_cast<unsigned>(std::popcount(v)) < cfg.vote_threshold()) {
            continue;
        }
        double prob = 1.0;
        for (unsigned i = 0; i < k; ++i) {
            prob *= received[(v >> i) & 1u];
        }
        total += prob;
    }
    return Probability::clamped(total);
}

} // namespace cssense
