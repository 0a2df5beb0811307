#include "cssense/fusion.hpp"
#include "cssense/local_sensing.hpp"
#include "cssense/montecarlo.hpp"
#include "cssense/reporting.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace cssense;

namespace {

SimScenario reference_scenario(unsigned n, double lambda, std::uint64_t trials, std::uint64_t seed) {
    return SimScenario{SensingParams::from_db(6, lambda, 20.0), channel_from_snr_db(10.0), FusionConfig(4, n), trials,
                       seed};
}

bool same(const SimResult& a, const SimResult& b) {
    return a.counts.trials_h0 == b.counts.trials_h0 && a.counts.trials_h1 == b.counts.trials_h1 &&
           a.counts.fused_false_alarms == b.counts.fused_false_alarms &&
           a.counts.fused_misses == b.counts.fused_misses &&
           a.counts.local_false_alarms == b.counts.local_false_alarms &&
           a.counts.local_misses == b.counts.local_misses && a.counts.report_errors == b.counts.report_errors &&
           a.counts.report_bits == b.counts.report_bits && a.fused.qf.value() == b.fused.qf.value() &&
           a.fused.qm.value() == b.fused.qm.value();
}

void check_against_closed_form(const SimResult& r, const SimScenario& s) {
    const Probability pf = local_pf(s.sensing);
    const Probability pm = local_pm(s.sensing);
    const Probability pe = s.channel.error_probability();
    const double qf = fused_qf(s.fusion, pf, pe);
    const double qm = fused_qm(s.fusion, pm, pe);
    CHECK(std::fabs(r.fused.qf - qf) <= 4.0 * binomial_stderr(qf, r.counts.trials_h0) + 1e-15);
    CHECK(std::fabs(r.fused.qm - qm) <= 4.0 * binomial_stderr(qm, r.counts.trials_h1) + 1e-15);
}

} // namespace

TEST_CASE("input validation") {
    CHECK_THROWS_AS(run_sim(reference_scenario(2, 10.0, 0, 1)), std::invalid_argument);
    const SimScenario s = reference_scenario(2, 10.0, 100, 1);
    CHECK_THROWS_AS(run_sweep(s, std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(run_sweep(s, std::vector<double>{5.0, 5.0}), std::invalid_argument);
    CHECK_THROWS_AS(run_sweep(s, std::vector<double>{-1.0, 5.0}), std::invalid_argument);
}

TEST_CASE("same seed reproduces, different seed differs") {
    const SimScenario s = reference_scenario(2, 12.0, 20000, 7);
    const SimResult a = run_sim(s);
    const SimResult b = run_sim(s);
    CHECK(same(a, b));
    SimScenario other = s;
    other.seed = 8;
    CHECK_FALSE(same(a, run_sim(other)));
}

TEST_CASE("results do not depend on the thread count") {
    const SimScenario s = reference_scenario(3, 14.0, 50000, 11);
    const SimResult one = run_sim(s, SimOptions{1});
    CHECK(same(one, run_sim(s, SimOptions{2})));
    CHECK(same(one, run_sim(s, SimOptions{7})));
    CHECK(same(one, run_sim(s, SimOptions{0})));
}

TEST_CASE("a single trial is accepted") {
    const SimResult r = run_sim(reference_scenario(1, 10.0, 1, 3));
    CHECK(r.counts.trials_h0 + r.counts.trials_h1 == 1);
}

TEST_CASE("lambda = 0 on a perfect channel always declares the band busy") {
    SimScenario s = reference_scenario(4, 0.0, 10000, 5);
    s.channel = ReportChannel::perfect();
    const SimResult r = run_sim(s);
    CHECK(r.fused.qf.value() == 1.0);
    CHECK(r.fused.qm.value() == 0.0);
    CHECK(r.report_error_rate_hat.value() == 0.0);
}

TEST_CASE("K = 1 matches the flipped local probabilities") {
    SimScenario s{SensingParams::from_db(6, 12.0, 20.0), channel_from_snr_db(10.0), FusionConfig(1, 1), 400000, 21};
    const SimResult r = run_sim(s);
    const Probability pe = s.channel.error_probability();
    const double qf = flip_composition(local_pf(s.sensing), pe);
    const double qm = flip_composition(local_pm(s.sensing), pe);
    CHECK(std::fabs(r.fused.qf - qf) <= 4.0 * binomial_stderr(qf, r.counts.trials_h0));
    CHECK(std::fabs(r.fused.qm - qm) <= 4.0 * binomial_stderr(qm, r.counts.trials_h1));
}

TEST_CASE("reference scenario agrees with the closed forms") {
    for (unsigned n = 1; n <= 4; ++n) {
        const SimScenario s = reference_scenario(n, 16.0, 200000, 100 + n);
        INFO("n=" << n);
        check_against_closed_form(run_sim(s), s);
    }
}

TEST_CASE("sweep uses common random numbers") {
    const std::vector<double> lambdas{0.0, 4.0, 8.0, 12.0, 16.0, 24.0, 40.0};
    const SimScenario s = reference_scenario(2, 0.0, 30000, 17);
    const std::vector<SimResult> sweep = run_sweep(s, lambdas);
    REQUIRE(sweep.size() == lambdas.size());
    for (std::size_t i = 0; i + 1 < sweep.size(); ++i) {
        CHECK(sweep[i].lambda == lambdas[i]);
        CHECK(sweep[i + 1].counts.fused_false_alarms <= sweep[i].counts.fused_false_alarms);
        CHECK(sweep[i + 1].counts.fused_misses >= sweep[i].counts.fused_misses);
        CHECK(sweep[i + 1].counts.trials_h0 == sweep[i].counts.trials_h0);
    }
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        SimScenario one = s;
        one.sensing = s.sensing.with_threshold(lambdas[i]);
        check_against_closed_form(sweep[i], one);
    }
}

TEST_CASE("a one-point sweep equals run_sim") {
    const SimScenario s = reference_scenario(2, 12.0, 25000, 19);
    const std::vector<double> lambdas{12.0};
    CHECK(same(run_sweep(s, lambdas).front(), run_sim(s)));
}

TEST_CASE("noise-only statistic is chi-square with 2M degrees of freedom") {
    for (unsigned m : {1u, 6u}) {
        const SensingParams p(m, 0.0, 100.0);
        const std::vector<double> t = sample_statistic(p, Hypothesis::noise_only, 1000000, 3);
        double mean = 0.0;
        for (double v : t) {
            mean += v;
        }
        mean /= static_cast<double>(t.size());
        double var = 0.0;
        for (double v : t) {
            var += (v - mean) * (v - mean);
        }
        var /= static_cast<double>(t.size() - 1);
        const double n = static_cast<double>(t.size());
        // For χ²(k): variance 2k, central fourth moment 12k(k+4).
        const double k = 2.0 * m;
        const double mu4 = 12.0 * k * (k + 4.0);
        const double var_se = std::sqrt((mu4 - 4.0 * k * k) / n);
        INFO("m=" << m);
        CHECK(std::fabs(mean - 2.0 * m) <= 4.0 * std::sqrt(4.0 * m / n));
        CHECK(std::fabs(var - 4.0 * m) <= 4.0 * var_se);
    }
}

TEST_CASE("report error rate estimate tracks Q(0.5/sigma)") {
    const SimScenario s = reference_scenario(2, 12.0, 200000, 23);
    const SimResult r = run_sim(s);
    const double pe = s.channel.error_probability();
    CHECK(r.counts.report_bits == 4 * s.trials);
    CHECK(std::fabs(r.report_error_rate_hat - pe) <= 4.0 * binomial_stderr(pe, r.counts.report_bits));
}

TEST_CASE("per-radio estimates match local_pf and local_pm") {
    struct Case {
        unsigned m;
        double lambda;
        double snr_db;
    };
    const Case cases[] = {{1, 2.0, 0.0}, {2, 6.0, 10.0}, {6, 12.0, 20.0}, {6, 20.0, 20.0}, {10, 30.0, 15.0}};
    std::uint64_t seed = 40;
    for (const Case& c : cases) {
        SimScenario s{SensingParams::from_db(c.m, c.lambda, c.snr_db), ReportChannel::perfect(), FusionConfig(4, 2),
                      250000, seed++};
        const SimResult r = run_sim(s);
        const double pf = local_pf(s.sensing);
        const double pm = local_pm(s.sensing);
        INFO("m=" << c.m << " lambda=" << c.lambda << " snr=" << c.snr_db);
        CHECK(std::fabs(r.per_radio_pf_hat - pf) <= 4.0 * binomial_stderr(pf, 4 * r.counts.trials_h0));
        CHECK(std::fabs(r.per_radio_pm_hat - pm) <= 4.0 * binomial_stderr(pm, 4 * r.counts.trials_h1));
    }
}
