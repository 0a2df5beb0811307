#include "cssense/fusion.hpp"
#include "cssense/local_sensing.hpp"
#include "cssense/reporting.hpp"
#include "cssense/roc.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

using namespace cssense;

namespace {

const SensingParams kSensing = SensingParams::from_db(6, 0.0, 20.0);

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return g;
}

// Dense threshold grid built without the library's range helpers: λ = 0 plus
// geometric spacing from 1e-4 to 5000.
std::vector<double> dense_grid(std::size_t count) {
    std::vector<double> g{0.0};
    for (std::size_t i = 0; i < count; ++i) {
        g.push_back(1e-4 * std::pow(5e7, static_cast<double>(i) / static_cast<double>(count - 1)));
    }
    return g;
}

struct Sampled {
    std::vector<double> qf;
    std::vector<double> qm;
};

Sampled sample_rule(unsigned k, unsigned n, double pe, const std::vector<double>& grid) {
    Sampled s;
    for (double lambda : grid) {
        const SensingParams p = kSensing.with_threshold(lambda);
        s.qf.push_back(fused_qf(FusionConfig(k, n), local_pf(p), Probability(pe)));
        s.qm.push_back(fused_qm(FusionConfig(k, n), local_pm(p), Probability(pe)));
    }
    return s;
}

// Brackets the constrained optimum of one sampled rule. qm rises and qf falls
// with λ, so the optimum lies between the last grid point meeting the target
// and the first one that does not.
struct Bracket {
    bool feasible = false;
    double lower = 0.0;
    double upper = 2.0;
};

Bracket brute_bracket(const Sampled& s, double target) {
    Bracket b;
    for (std::size_t i = 0; i < s.qf.size(); ++i) {
        if (s.qm[i] <= target) {
            b.feasible = true;
            b.upper = s.qf[i];
            b.lower = i + 1 < s.qf.size() ? s.qf[i + 1] : s.qf[i];
        }
    }
    return b;
}

} // namespace

TEST_CASE("identity reduction: K = 1 on a perfect channel is the local curve") {
    const std::vector<double> grid = linear_grid(0.0, 60.0, 61);
    const RocCurve c = analytic_roc(FusionConfig(1, 1), kSensing, ReportChannel::perfect(), grid);
    REQUIRE(c.points.size() == grid.size());
    for (const RocPoint& p : c.points) {
        const SensingParams s = kSensing.with_threshold(p.lambda);
        CHECK(std::fabs(p.qf - local_pf(s)) <= 1e-15);
        CHECK(std::fabs(p.qm - local_pm(s)) <= 1e-15);
    }
    CHECK(c.is_valid());
}

TEST_CASE("analytic_roc rejects bad grids") {
    CHECK_THROWS_AS(analytic_roc(FusionConfig(4, 2), kSensing, ReportChannel::perfect(), std::vector<double>{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        analytic_roc(FusionConfig(4, 2), kSensing, ReportChannel::perfect(), std::vector<double>{3.0, 2.0}),
        std::invalid_argument);
}

TEST_CASE("large-threshold end of every curve sits on the qf floor") {
    const std::vector<double> grid = covering_lambda_grid(kSensing, 200);
    for (double snr : {5.0, 10.0, 20.0}) {
        for (unsigned n = 1; n <= 4; ++n) {
            const RocCurve c = analytic_roc(FusionConfig(4, n), kSensing, channel_from_snr_db(snr), grid);
            CHECK(c.is_valid());
            CHECK(std::fabs(c.points.back().qf - c.qf_floor) <= 1e-9);
            CHECK(std::fabs(c.points.front().qm - c.qm_floor) <= 1e-9);
        }
    }
}

TEST_CASE("search range covers both tails") {
    const LambdaRange r = search_range(kSensing);
    CHECK(r.lo == 0.0);
    const SensingParams top = kSensing.with_threshold(r.hi);
    CHECK(local_pf(top) <= 1e-12);
    CHECK(local_pd(top) <= 1.0001e-12);
}

TEST_CASE("perfect reporting: the OR rule dominates at every common qm level") {
    const std::vector<double> grid = covering_lambda_grid(kSensing, 300);
    std::vector<RocCurve> curves;
    for (unsigned n = 1; n <= 4; ++n) {
        curves.push_back(analytic_roc(FusionConfig(4, n), kSensing, ReportChannel::perfect(), grid));
    }
    for (const RocPoint& p : curves[0].points) {
        for (unsigned n = 2; n <= 4; ++n) {
            const auto other = curves[n - 1].qf_at_qm(p.qm);
            if (other) {
                CHECK(p.qf <= *other + 1e-9);
            }
        }
    }
}

TEST_CASE("rule n + 1 beats rule n at loose miss targets on a noisy channel") {
    const ReportChannel ch = channel_from_snr_db(10.0);
    for (unsigned n = 1; n <= 3; ++n) {
        const double floor_n = asymptotic_qf(FusionConfig(4, n), ch.error_probability());
        const double floor_up = asymptotic_qf(FusionConfig(4, n + 1), ch.error_probability());
        REQUIRE(floor_up < floor_n);
        const ConstrainedOptimum lo = best_at_target(FusionConfig(4, n), kSensing, ch, 0.45);
        const ConstrainedOptimum hi = best_at_target(FusionConfig(4, n + 1), kSensing, ch, 0.45);
        REQUIRE(lo.feasible);
        REQUIRE(hi.feasible);
        CHECK(hi.qf < lo.qf);
    }
}

TEST_CASE("best_at_target") {
    const ReportChannel ch = channel_from_snr_db(10.0);
    const ConstrainedOptimum o = best_at_target(FusionConfig(4, 2), kSensing, ch, 0.1);
    REQUIRE(o.feasible);
    CHECK(o.qm <= 0.1);
    CHECK(o.qm == doctest::Approx(0.1).epsilon(1e-8));
    const SensingParams at = kSensing.with_threshold(o.lambda);
    CHECK(o.qf == doctest::Approx(fused_qf(FusionConfig(4, 2), local_pf(at), ch.error_probability())).epsilon(1e-14));
    CHECK_FALSE(best_at_target(FusionConfig(4, 4), kSensing, ch, 0.1).feasible);
}

TEST_CASE("qm_star: no crossover on a near-perfect channel") {
    const ReportChannel ch = ReportChannel::from_noise_variance(1.0 / 1e12);
    const ReportChannel tiny = [] {
        // σ chosen so that Q(0.5/σ) = 1e-12.
        double lo = 1e-3;
        double hi = 1.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (error_probability(ReportChannel::from_noise_variance(mid)) > 1e-12 ? hi : lo) = mid;
        }
        return ReportChannel::from_noise_variance(lo);
    }();
    CHECK(tiny.error_probability().value() == doctest::Approx(1e-12).epsilon(1e-6));
    for (const ReportChannel& c : {ch, tiny}) {
        for (unsigned n = 1; n <= 3; ++n) {
            CHECK_FALSE(qm_star(4, n, kSensing, c).found());
        }
    }
}

TEST_CASE("qm_star: 10 dB reporting produces a crossover confirmed by a dense scan") {
    const ReportChannel ch = channel_from_snr_db(10.0);
    const Crossover x = qm_star(4, 1, kSensing, ch);
    REQUIRE(x.found());
    CHECK(x.qm > 0.0);
    CHECK(x.qm < 1.0);
    CHECK(std::fabs(x.delta_qf) <= 1e-10);

    // Oracle: Δqf over 10⁴ λ points at equal qm, rule 2 evaluated against rule 1
    // interpolated from its own dense samples.
    const std::vector<double> grid = dense_grid(10000);
    const Sampled one = sample_rule(4, 1, ch.error_probability(), grid);
    const Sampled two = sample_rule(4, 2, ch.error_probability(), grid);
    int positive = 0;
    int negative = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double q = two.qm[i];
        auto it = std::upper_bound(one.qm.begin(), one.qm.end(), q);
        if (it == one.qm.begin() || it == one.qm.end()) {
            continue;
        }
        const std::size_t j = static_cast<std::size_t>(it - one.qm.begin());
        const double t = (q - one.qm[j - 1]) / (one.qm[j] - one.qm[j - 1]);
        const double qf_one = one.qf[j - 1] + t * (one.qf[j] - one.qf[j - 1]);
        const double delta = two.qf[i] - qf_one;
        positive += delta > 1e-9 ? 1 : 0;
        negative += delta < -1e-9 ? 1 : 0;
    }
    CHECK(positive > 0);
    CHECK(negative > 0);
}

TEST_CASE("qm_star: an information-free channel is not reported as a crossing") {
    const ReportChannel useless = ReportChannel::from_noise_variance(1e12);
    CHECK(useless.error_probability().value() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK_FALSE(qm_star(2, 1, kSensing, useless).found());
    CHECK_THROWS_AS(qm_star(4, 4, kSensing, useless), std::invalid_argument);
    CHECK_THROWS_AS(qm_star(4, 0, kSensing, useless), std::invalid_argument);
}

TEST_CASE("crossover table at 10 dB and 5 dB") {
    for (double snr : {10.0, 5.0}) {
        const CrossoverTable t = crossover_table(4, kSensing, channel_from_snr_db(snr));
        REQUIRE(t.levels.size() == 3);
        INFO("snr=" << snr);
        for (const Crossover& c : t.crossovers) {
            CHECK(c.found());
        }
        CHECK(t.monotone);
        CHECK(t.levels[0] < t.levels[1]);
        CHECK(t.levels[1] < t.levels[2]);
    }
}

TEST_CASE("optimal_n: perfect channel always picks the OR rule") {
    for (double target : {1e-6, 1e-3, 0.01, 0.1, 0.3, 0.6, 0.9}) {
        const OptimalN r = optimal_n(Probability(target), 4, kSensing, ReportChannel::perfect());
        CHECK(r.n == 1);
        CHECK(r.direct_n == 1);
        CHECK(r.agreed);
    }
}

TEST_CASE("optimal_n: target just above the OR floor picks n = 1") {
    const ReportChannel ch = ReportChannel::from_noise_variance(0.1);
    const double pe = ch.error_probability();
    const double floor1 = asymptotic_qm(FusionConfig(4, 1), ch.error_probability());
    CHECK(floor1 == doctest::Approx(pe * pe * pe * pe).epsilon(1e-12));
    const OptimalN r = optimal_n(Probability(floor1 * 1.01), 4, kSensing, ch);
    CHECK(r.n == 1);
    CHECK(r.direct_n == 1);
}

TEST_CASE("optimal_n: errors") {
    const ReportChannel ch = channel_from_snr_db(10.0);
    CHECK_THROWS_AS(optimal_n(Probability(0.0), 4, kSensing, ch), std::domain_error);
    CHECK_THROWS_AS(optimal_n(Probability(1.0), 4, kSensing, ch), std::domain_error);
    try {
        optimal_n(Probability(1e-30), 4, kSensing, ch);
        FAIL("expected InfeasibleTarget");
    } catch (const InfeasibleTarget& e) {
        const double pe = ch.error_probability();
        CHECK(e.min_achievable_qm() == doctest::Approx(pe * pe * pe * pe).epsilon(1e-12));
    }
}

TEST_CASE("optimal_n agrees with a dense brute-force search over 20 targets") {
    const ReportChannel ch = channel_from_snr_db(10.0);
    const double pe = ch.error_probability();
    const std::vector<double> grid = dense_grid(200000);
    std::vector<Sampled> rules;
    double max_floor = 0.0;
    for (unsigned n = 1; n <= 4; ++n) {
        rules.push_back(sample_rule(4, n, pe, grid));
        max_floor = std::max(max_floor, static_cast<double>(asymptotic_qm(FusionConfig(4, n), Probability(pe))));
    }
    std::vector<double> targets;
    for (int i = 1; i <= 20; ++i) {
        targets.push_back(max_floor + (0.5 - max_floor) * i / 21.0);
    }
    // Loose targets below the largest floor exercise the smaller-n intervals.
    for (double t : {0.001, 0.01, 0.03, 0.1}) {
        targets.push_back(t);
    }
    for (double target : targets) {
        const OptimalN r = optimal_n(Probability(target), 4, kSensing, ch);
        INFO("target=" << target);
        CHECK(r.agreed);
        CHECK(r.n == r.direct_n);
        std::vector<Bracket> brackets;
        for (unsigned n = 1; n <= 4; ++n) {
            brackets.push_back(brute_bracket(rules[n - 1], target));
        }
        const Bracket& chosen = brackets[r.n - 1];
        REQUIRE(chosen.feasible);
        CHECK(r.achieved.qf <= chosen.upper + 1e-12);
        CHECK(r.achieved.qf >= chosen.lower - 1e-12);
        // When the winning bracket is disjoint from every other rule's, the
        // brute-force winner is unambiguous and must match.
        unsigned clear_winner = 0;
        for (unsigned n = 1; n <= 4; ++n) {
            bool separated = brackets[n - 1].feasible;
            for (unsigned m = 1; m <= 4 && separated; ++m) {
                if (m != n && brackets[m - 1].feasible) {
                    separated = brackets[n - 1].upper < brackets[m - 1].lower;
                }
            }
            if (separated) {
                clear_winner = n;
            }
        }
        if (clear_winner != 0) {
            CHECK(r.n == clear_winner);
        }
        for (const Bracket& b : brackets) {
            if (b.feasible) {
                CHECK(r.achieved.qf <= b.upper + kQfTieTolerance);
            }
        }
    }
}

TEST_CASE("optimal_n: selections grow with the target") {
    const ReportChannel ch = channel_from_snr_db(10.0);
    unsigned prev = 1;
    for (double target : {0.001, 0.01, 0.03, 0.05, 0.1, 0.2, 0.35, 0.5, 0.8}) {
        const OptimalN r = optimal_n(Probability(target), 4, kSensing, ch);
        CHECK(r.n >= prev);
        prev = r.n;
    }
    CHECK(prev == 4);
}

TEST_CASE("RocCurve::is_valid catches broken invariants") {
    const std::vector<double> grid = linear_grid(0.0, 80.0, 41);
    RocCurve c = analytic_roc(FusionConfig(4, 2), kSensing, channel_from_snr_db(10.0), grid);
    CHECK(c.is_valid());
    RocCurve swapped = c;
    std::swap(swapped.points[3], swapped.points[4]);
    CHECK_FALSE(swapped.is_valid());
    RocCurve below = c;
    below.qf_floor = Probability(std::min(1.0, c.points.back().qf + 1e-3));
    CHECK_FALSE(below.is_valid());
}
