#include "cssense/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace cssense {

namespace {

constexpr std::uint64_t kChunkTrials = 4096;

enum class Purpose : std::uint32_t { hypothesis = 0, fading = 1, sensing = 2, report = 3 };

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t chunk, std::uint32_t radio, Purpose purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32),
                      radio, static_cast<std::uint32_t>(purpose)};
    return std::mt19937_64(seq);
}

// Per-radio generators for one chunk. Distributions live next to their
// engines because std::normal_distribution caches its second deviate.
struct RadioStreams {
    std::mt19937_64 fading_engine;
    std::mt19937_64 sensing_engine;
    std::mt19937_64 report_engine;
    std::exponential_distribution<double> snr;
    std::uniform_real_distribution<double> phase{0.0, 2.0 * std::numbers::pi};
    std::normal_distribution<double> sensing_noise;
    std::normal_distribution<double> report_noise;

    RadioStreams(std::uint64_t seed, std::uint64_t chunk, std::uint32_t radio, double avg_snr)
        : fading_engine(make_stream(seed, chunk, radio, Purpose::fading)),
          sensing_engine(make_stream(seed, chunk, radio, Purpose::sensing)),
          report_engine(make_stream(seed, chunk, radio, Purpose::report)),
          snr(1.0 / avg_snr) {}

    double statistic(unsigned m, bool active) {
        std::complex<double> h{0.0, 0.0};
        if (active) {
            const double gamma = snr(fading_engine);
            h = std::polar(std::sqrt(gamma / m), phase(fading_engine));
        }
        constexpr double noise_scale = std::numbers::sqrt2 / 2.0;
        double energy = 0.0;
        for (unsigned i = 0; i < m; ++i) {
            const std::complex<double> eta{noise_scale * sensing_noise(sensing_engine),
                                           noise_scale * sensing_noise(sensing_engine)};
            energy += std::norm(h + eta);
        }
        return 2.0 * energy;
    }
};

struct LambdaCounts {
    std::uint64_t fused_false_alarms = 0;
    std::uint64_t fused_misses = 0;
    std::uint64_t local_false_alarms = 0;
    std::uint64_t local_misses = 0;
    std::uint64_t report_errors = 0;
};

struct Tally {
    std::uint64_t trials_h0 = 0;
    std::uint64_t trials_h1 = 0;
    std::vector<LambdaCounts> per_lambda;

    void merge(const Tally& other) {
        trials_h0 += other.trials_h0;
        trials_h1 += other.trials_h1;
        for (std::size_t j = 0; j < per_lambda.size(); ++j) {
            auto& a = per_lambda[j];
            const auto& b = other.per_lambda[j];
            a.fused_false_alarms += b.fused_false_alarms;
            a.fused_misses += b.fused_misses;
            a.local_false_alarms += b.local_false_alarms;
            a.local_misses += b.local_misses;
            a.report_errors += b.report_errors;
        }
    }
};

void run_chunk(const SimScenario& s, std::span<const double> lambdas, std::uint64_t chunk, Tally& tally) {
    const unsigned k = s.fusion.radios();
    const unsigned n = s.fusion.vote_threshold();
    const unsigned m = s.sensing.samples();
    const double sigma = std::sqrt(s.channel.noise_variance());

    std::mt19937_64 hypothesis = make_stream(s.seed, chunk, 0, Purpose::hypothesis);
    std::vector<RadioStreams> radios;
    radios.reserve(k);
    for (unsigned r = 0; r < k; ++r) {
        radios.emplace_back(s.seed, chunk, r, s.sensing.avg_snr());
    }

    const std::uint64_t first = chunk * kChunkTrials;
    const std::uint64_t last = std::min(s.trials, first + kChunkTrials);
    std::vector<double> stat(k);
    std::vector<double> noise(k);
    for (std::uint64_t t = first; t < last; ++t) {
        const bool active = (hypothesis() >> 63) != 0;
        (active ? tally.trials_h1 : tally.trials_h0) += 1;
        for (unsigned r = 0; r < k; ++r) {
            stat[r] = radios[r].statistic(m, active);
            noise[r] = sigma * radios[r].report_noise(radios[r].report_engine);
        }
        for (std::size_t j = 0; j < lambdas.size(); ++j) {
            auto& c = tally.per_lambda[j];
            unsigned ones = 0;
            for (unsigned r = 0; r < k; ++r) {
                const int decision = stat[r] >= lambdas[j] ? 1 : 0;
                const int received = slice_report(decision + noise[r]);
                ones += static_cast<unsigned>(received);
                c.report_errors += (received != decision) ? 1 : 0;
                if (active) {
                    c.local_misses += decision == 0 ? 1 : 0;
                } else {
                    c.local_false_alarms += decision == 1 ? 1 : 0;
                }
            }
            const bool declared_active = ones >= n;
            if (active) {
                c.fused_misses += declared_active ? 0 : 1;
            } else {
                c.fused_false_alarms += declared_active ? 1 : 0;
            }
        }
    }
}

Probability rate(std::uint64_t events, std::uint64_t total) {
    if (total == 0) {
        return Probability(0.0);
    }
    return Probability(static_cast<double>(events) / static_cast<double>(total));
}

void check_lambdas(std::span<const double> lambdas) {
    if (lambdas.empty()) {
        throw std::invalid_argument("threshold list must not be empty");
    }
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        if (!(lambdas[j] >= 0.0) || !std::isfinite(lambdas[j])) {
            throw std::invalid_argument("thresholds must be finite and nonnegative");
        }
        if (j > 0 && !(lambdas[j] > lambdas[j - 1])) {
            throw std::invalid_argument("thresholds must be strictly increasing");
        }
    }
}

} // namespace

double binomial_stderr(double p, std::uint64_t n) {
    if (n == 0) {
        return 0.0;
    }
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double LinkStats::error_rate() const noexcept {
    const auto total = transmissions();
    return total == 0 ? 0.0 : static_cast<double>(errors()) / static_cast<double>(total);
}

std::vector<SimResult> run_sweep(const SimScenario& base, std::span<const double> lambdas, SimOptions opts) {
    check_lambdas(lambdas);
    if (base.trials < 1) {
        throw std::invalid_argument("trials must be at least 1");
    }

    const std::uint64_t chunks = (base.trials + kChunkTrials - 1) / kChunkTrials;
    unsigned workers = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.threads;
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));

    std::vector<Tally> partial(workers);
    for (auto& p : partial) {
        p.per_lambda.resize(lambdas.size());
    }
    std::atomic<std::uint64_t> next{0};
    auto work = [&](unsigned w) {
        for (std::uint64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
            run_chunk(base, lambdas, c, partial[w]);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work, w);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    // Integer counts: the merge is exact whatever the chunk-to-worker split.
    Tally total;
    total.per_lambda.resize(lambdas.size());
    for (const auto& p : partial) {
        total.merge(p);
    }

    const std::uint64_t k = base.fusion.radios();
    std::vector<SimResult> out;
    out.reserve(lambdas.size());
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        const auto& c = total.per_lambda[j];
        SimResult r;
        r.lambda = lambdas[j];
        r.counts = {total.trials_h0,      total.trials_h1,  c.fused_false_alarms, c.fused_misses,
                    c.local_false_alarms, c.local_misses,   c.report_errors,      base.trials * k};
        r.fused.kind = PerfKind::empirical;
        r.fused.qf = rate(c.fused_false_alarms, total.trials_h0);
        r.fused.qm = rate(c.fused_misses, total.trials_h1);
        r.fused.qf_stderr = binomial_stderr(r.fused.qf, total.trials_h0);
        r.fused.qm_stderr = binomial_stderr(r.fused.qm, total.trials_h1);
        r.fused.trials_h0 = total.trials_h0;
        r.fused.trials_h1 = total.trials_h1;
        r.per_radio_pf_hat = rate(c.local_false_alarms, total.trials_h0 * k);
        r.per_radio_pm_hat = rate(c.local_misses, total.trials_h1 * k);
        r.report_error_rate_hat = rate(c.report_errors, base.trials * k);
        out.push_back(r);
    }
    return out;
}

SimResult run_sim(const SimScenario& s, SimOptions opts) {
    const double lambda = s.sensing.threshold();
    return run_sweep(s, std::span<const double>(&lambda, 1), opts).front();
}

std::vector<double> sample_statistic(const SensingParams& sensing, Hypothesis h, std::uint64_t count,
                                     std::uint64_t seed) {
    std::vector<double> out;
    out.reserve(count);
    const bool active = h == Hypothesis::primary_active;
    for (std::uint64_t chunk = 0; out.size() < count; ++chunk) {
        RadioStreams streams(seed, chunk, 0, sensing.avg_snr());
        const std::uint64_t take = std::min<std::uint64_t>(kChunkTrials, count - out.size());
        for (std::uint64_t i = 0; i < take; ++i) {
            out.push_back(streams.statistic(sensing.samples(), active));
        }
    }
    return out;
}

LinkStats simulate_report_link(const ReportChannel& ch, std::uint64_t transmissions, std::uint64_t seed) {
    std::mt19937_64 bits = make_stream(seed, 0, 0, Purpose::hypothesis);
    std::mt19937_64 engine = make_stream(seed, 0, 0, Purpose::report);
    std::normal_distribution<double> noise;
    const double sigma = std::sqrt(ch.noise_variance());
    LinkStats stats;
    for (std::uint64_t i = 0; i < transmissions; ++i) {
        const int sent = static_cast<int>(bits() >> 63);
        const int received = slice_report(sent + sigma * noise(engine));
        if (sent == 0) {
            ++stats.zeros_sent;
            stats.zero_to_one += received == 1 ? 1 : 0;
        } else {
            ++stats.ones_sent;
            stats.one_to_zero += received == 0 ? 1 : 0;
        }
    }
    return stats;
}

} // namespace cssense
