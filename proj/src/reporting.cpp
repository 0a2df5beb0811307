#include "cssense/reporting.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cssense {

ReportChannel ReportChannel::from_noise_variance(double sigma2) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw std::invalid_argument("reporting noise variance must be finite and positive, got " +
                                    std::to_string(sigma2));
    }
    return ReportChannel(sigma2, gaussian_q(0.5 / std::sqrt(sigma2)));
}

ReportChannel ReportChannel::from_snr_db(double snr_r_db) {
    if (!std::isfinite(snr_r_db)) {
        throw std::invalid_argument("reporting SNR must be finite");
    }
    return from_noise_variance(std::pow(10.0, -snr_r_db / 10.0));
}

ReportChannel ReportChannel::perfect() noexcept {
    return ReportChannel(0.0, Probability(0.0));
}

ReportChannel channel_from_snr_db(double snr_r_db) {
    return ReportChannel::from_snr_db(snr_r_db);
}

Probability error_probability(const ReportChannel& ch) {
    return ch.error_probability();
}

Probability flip_composition(Probability p, Probability pe) {
    return Probability::clamped(p * (1.0 - pe) + (1.0 - p) * pe);
}

} // namespace cssense
