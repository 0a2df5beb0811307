#ifndef CSSENSE_LOCAL_SENSING_HPP
#define CSSENSE_LOCAL_SENSING_HPP

#include "cssense/mathx.hpp"

namespace cssense {

/// Per-radio energy detector configuration.
///
/// The statistic is T = (2/σ_η²)·Σ|r(n)|² over M complex samples, which is
/// chi-square with 2M degrees of freedom when only noise is present.
/// avg_snr is the mean of the exponentially distributed total SNR collected
/// over one sensing event (Rayleigh block fading), stored linear.
class SensingParams {
public:
    /// Throws std::invalid_argument unless samples_m >= 1, threshold >= 0 and
    /// avg_snr > 0 (all finite).
    SensingParams(unsigned samples_m, double threshold_lambda, double avg_snr);

    /// Same, with the average SNR given in dB.
    static SensingParams from_db(unsigned samples_m, double threshold_lambda, double avg_snr_db);

    unsigned samples() const noexcept { return samples_m_; }
    double threshold() const noexcept { return threshold_lambda_; }
    double avg_snr() const noexcept { return avg_snr_; }

    SensingParams with_threshold(double threshold_lambda) const;

private:
    unsigned samples_m_;
    double threshold_lambda_;
    double avg_snr_;
};

/// 10^(dB/10).
double db_to_linear(double db);

/// Pr{T >= λ | noise only} = Γ(M, λ/2)/Γ(M). The SNR is not used.
Probability local_pf(const SensingParams& p);

/// Detection probability averaged over Rayleigh fading.
Probability local_pd(const SensingParams& p);

/// 1 − local_pd.
Probability local_pm(const SensingParams& p);

/// λ with local_pf(M, λ) = target_pf. Throws std::domain_error unless
/// 0 < target_pf < 1.
double threshold_for_pf(Probability target_pf, unsigned samples_m);

/// λ with local_pd(M, λ, γ̄) = target_pd, for 0 < target_pd < 1.
double threshold_for_pd(Probability target_pd, unsigned samples_m, double avg_snr);

} // namespace cssense

#endif // CSSENSE_LOCAL_SENSING_HPP
