#ifndef CSSENSE_REPORTING_HPP
#define CSSENSE_REPORTING_HPP

#include "cssense/mathx.hpp"

namespace cssense {

/// One-bit reporting link shared by all radios: s = d + n, n ~ N(0, σ²),
/// sliced at 0.5. The bit-error probability is derived from σ², never set.
class ReportChannel {
public:
    /// Throws std::invalid_argument unless sigma2 is finite and positive.
    static ReportChannel from_noise_variance(double sigma2);

    /// SNR_r = 10·log10(1/σ²).
    static ReportChannel from_snr_db(double snr_r_db);

    /// Noiseless link: σ² = 0 and P_e = 0 exactly.
    static ReportChannel perfect() noexcept;

    double noise_variance() const noexcept { return sigma2_; }
    Probability error_probability() const noexcept { return pe_; }
    bool is_perfect() const noexcept { return sigma2_ == 0.0; }

private:
    ReportChannel(double sigma2, Probability pe) noexcept : sigma2_(sigma2), pe_(pe) {}

    double sigma2_;
    Probability pe_;
};

ReportChannel channel_from_snr_db(double snr_r_db);

/// Q(½·√(1/σ²)).
Probability error_probability(const ReportChannel& ch);

/// Probability that the fusion center reads 1 when the radio sends 1 with
/// probability p over a link that flips bits with probability pe.
Probability flip_composition(Probability p, Probability pe);

/// Midpoint slicer for the {0, 1} alphabet; exactly 0.5 reads as 1.
constexpr int slice_report(double received) noexcept {
    return received >= 0.5 ? 1 : 0;
}

} // namespace cssense

#endif // CSSENSE_REPORTING_HPP
