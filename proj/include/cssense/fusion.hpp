#ifndef CSSENSE_FUSION_HPP
#define CSSENSE_FUSION_HPP

#include "cssense/mathx.hpp"

#include <cstdint>

namespace cssense {

/// n-out-of-K vote: the fusion center declares the band occupied when at
/// least n of the K received bits are 1.
class FusionConfig {
public:
    /// Throws std::invalid_argument unless 1 <= n <= K.
    FusionConfig(unsigned num_radios_k, unsigned vote_threshold_n);

    unsigned radios() const noexcept { return k_; }
    unsigned vote_threshold() const noexcept { return n_; }
    FusionConfig with_vote_threshold(unsigned n) const { return FusionConfig(k_, n); }

    friend bool operator==(const FusionConfig&, const FusionConfig&) = default;

private:
    unsigned k_;
    unsigned n_;
};

enum class PerfKind { analytical, empirical };

/// Fused (false alarm, miss) pair. Analytical points carry zero standard
/// errors and zero trial counts.
struct PerfPoint {
    Probability qf;
    Probability qm;
    PerfKind kind = PerfKind::analytical;
    double qf_stderr = 0.0;
    double qm_stderr = 0.0;
    std::uint64_t trials_h0 = 0;
    std::uint64_t trials_h1 = 0;

    static PerfPoint analytical(Probability qf, Probability qm) { return {qf, qm}; }
};

/// Pr{at least n received 1s | noise only}. The summation index counts
/// radios whose received bit is 0.
Probability fused_qf(const FusionConfig& cfg, Probability pf, Probability pe);

/// Pr{at most n−1 received 1s | primary user active}.
Probability fused_qm(const FusionConfig& cfg, Probability pm, Probability pe);

/// Limit of fused_qf as pf → 0; bit-identical to fused_qf(cfg, 0, pe).
Probability asymptotic_qf(const FusionConfig& cfg, Probability pe);

/// Limit of fused_qm as pm → 0; bit-identical to fused_qm(cfg, 0, pe).
Probability asymptotic_qm(const FusionConfig& cfg, Probability pe);

/// Brute-force reference: sums, over all 2^K received-bit vectors, the
/// probability of vectors with at least n ones when every radio sends 1 with
/// probability p_assert and each bit flips with probability pe.
/// Throws std::invalid_argument for K > 20.
Probability enumerate_rule(const FusionConfig& cfg, Probability p_assert, Probability pe);

} // namespace cssense

#endif // CSSENSE_FUSION_HPP
