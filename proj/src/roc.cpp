#include "cssense/roc.hpp"

#include "cssense/detail/bisect.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cssense {

namespace {

constexpr double kRangeTail = 1e-12;
constexpr std::size_t kScanPointsPerSide = 400;

// One vote rule evaluated as a function of the detector threshold.
struct Rule {
    FusionConfig cfg;
    SensingParams sensing;
    Probability pe;

    double qf(double lambda) const {
        return fused_qf(cfg, local_pf(sensing.with_threshold(lambda)), pe);
    }
    double qm(double lambda) const {
        return fused_qm(cfg, local_pm(sensing.with_threshold(lambda)), pe);
    }
};

ConstrainedOptimum best_in_range(const Rule& rule, const LambdaRange& range, double target_qm) {
    ConstrainedOptimum out;
    if (rule.qm(range.lo) > target_qm) {
        return out;
    }
    out.feasible = true;
    if (rule.qm(range.hi) <= target_qm) {
        out.lambda = range.hi;
    } else {
        out.lambda =
            detail::bisect([&](double lambda) { return rule.qm(lambda) <= target_qm; }, range.lo, range.hi).lo;
    }
    out.qf = rule.qf(out.lambda);
    out.qm = rule.qm(out.lambda);
    return out;
}

int tie_sign(double delta) {
    if (delta > kQfTieTolerance) {
        return 1;
    }
    if (delta < -kQfTieTolerance) {
        return -1;
    }
    return 0;
}

} // namespace

std::optional<double> RocCurve::qf_at_qm(double qm) const {
    if (points.empty() || qm < points.front().qm || qm > points.back().qm) {
        return std::nullopt;
    }
    // Last point with qm_i <= qm; a plateau resolves to its lowest qf.
    const auto it = std::partition_point(points.begin(), points.end(),
                                         [&](const RocPoint& p) { return p.qm <= qm; });
    const auto& left = *(it - 1);
    if (left.qm == qm || it == points.end()) {
        return left.qf.value();
    }
    const auto& right = *it;
    const double t = (qm - left.qm) / (right.qm - left.qm);
    return left.qf + t * (right.qf - left.qf);
}

bool RocCurve::is_valid() const {
    constexpr double slack = 1e-12;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (p.qf < qf_floor - slack || p.qm < qm_floor - slack) {
            return false;
        }
        if (i == 0) {
            continue;
        }
        const auto& prev = points[i - 1];
        if (!(p.lambda > prev.lambda) || p.qf > prev.qf + slack || p.qm < prev.qm - slack) {
            return false;
        }
    }
    return true;
}

RocCurve analytic_roc(const FusionConfig& cfg, const SensingParams& sensing, const ReportChannel& channel,
                      std::span<const double> lambda_grid) {
    if (lambda_grid.empty()) {
        throw std::invalid_argument("lambda grid must not be empty");
    }
    const Probability pe = channel.error_probability();
    RocCurve curve{cfg, sensing, channel, {}, asymptotic_qf(cfg, pe), asymptotic_qm(cfg, pe)};
    curve.points.reserve(lambda_grid.size());
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        const double lambda = lambda_grid[i];
        if (i > 0 && !(lambda > lambda_grid[i - 1])) {
            throw std::invalid_argument("lambda grid must be strictly increasing");
        }
        const SensingParams at = sensing.with_threshold(lambda);
        const Probability pf = local_pf(at);
        const Probability pm = local_pm(at);
        curve.points.push_back({lambda, pf, pm, fused_qf(cfg, pf, pe), fused_qm(cfg, pm, pe)});
    }
    return curve;
}

LambdaRange search_range(const SensingParams& sensing) {
    const Probability tail(kRangeTail);
    const double hi = std::max(threshold_for_pf(tail, sensing.samples()),
                               threshold_for_pd(tail, sensing.samples(), sensing.avg_snr()));
    return {0.0, hi};
}

std::vector<double> covering_lambda_grid(const SensingParams& sensing, std::size_t points_per_side) {
    std::vector<double> grid{0.0};
    grid.reserve(2 * points_per_side + 1);
    const double decades = -std::log10(kRangeTail);
    for (std::size_t i = 1; i <= points_per_side; ++i) {
        const Probability p(std::pow(10.0, -decades * static_cast<double>(i) / static_cast<double>(points_per_side)));
        grid.push_back(threshold_for_pf(p, sensing.samples()));
        grid.push_back(threshold_for_pd(p, sensing.samples(), sensing.avg_snr()));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

ConstrainedOptimum best_at_target(const FusionConfig& cfg, const SensingParams& sensing,
                                  const ReportChannel& channel, double target_qm) {
    return best_in_range(Rule{cfg, sensing, channel.error_probability()}, search_range(sensing), target_qm);
}

Crossover qm_star(unsigned num_radios_k, unsigned n, const SensingParams& sensing,
                  const ReportChannel& channel) {
    if (n < 1 || n + 1 > num_radios_k) {
        throw std::invalid_argument("qm_star needs 1 <= n <= K-1");
    }
    const Probability pe = channel.error_probability();
    const Rule lower{FusionConfig(num_radios_k, n), sensing, pe};
    const Rule upper{FusionConfig(num_radios_k, n + 1), sensing, pe};
    const LambdaRange range = search_range(sensing);

    // Rule n+1 at λ against the best rule-n point with the same or lower qm.
    auto delta = [&](double lambda) {
        const ConstrainedOptimum best = best_in_range(lower, range, upper.qm(lambda));
        if (!best.feasible) {
            return -1.0;
        }
        return upper.qf(lambda) - best.qf;
    };

    const std::vector<double> grid = covering_lambda_grid(sensing, kScanPointsPerSide);
    double last_ahead = 0.0;
    bool seen_ahead = false;
    for (double lambda : grid) {
        const int s = tie_sign(delta(lambda));
        if (s > 0) {
            seen_ahead = true;
            last_ahead = lambda;
        } else if (s < 0) {
            if (!seen_ahead) {
                return {CrossoverKind::upper_dominates, upper.qm(range.lo), range.lo, delta(range.lo)};
            }
            const auto br = detail::bisect([&](double x) { return delta(x) > 0.0; }, last_ahead, lambda);
            return {CrossoverKind::crossing, upper.qm(br.hi), br.hi, delta(br.hi)};
        }
    }
    return {CrossoverKind::lower_dominates, 1.0, range.hi, delta(range.hi)};
}

CrossoverTable crossover_table(unsigned num_radios_k, const SensingParams& sensing,
                               const ReportChannel& channel) {
    CrossoverTable table;
    for (unsigned n = 1; n < num_radios_k; ++n) {
        const Crossover c = qm_star(num_radios_k, n, sensing, channel);
        table.crossovers.push_back(c);
        table.levels.push_back(c.qm);
        if (table.levels.size() > 1 && table.levels.back() < table.levels[table.levels.size() - 2]) {
            table.monotone = false;
        }
    }
    return table;
}

InfeasibleTarget::InfeasibleTarget(double target_qm, double min_achievable_qm)
    : std::domain_error([&] {
          std::ostringstream msg;
          msg.precision(12);
          msg << "target_qm " << target_qm << " is below the smallest achievable fused miss probability "
              << min_achievable_qm;
          return msg.str();
      }()),
      min_qm_(min_achievable_qm) {}

OptimalN optimal_n(Probability target_qm, unsigned num_radios_k, const SensingParams& sensing,
                   const ReportChannel& channel) {
    if (target_qm.value() <= 0.0 || target_qm.value() >= 1.0) {
        throw std::domain_error("target_qm must lie strictly inside (0, 1)");
    }
    const Probability pe = channel.error_probability();
    double min_floor = 1.0;
    for (unsigned n = 1; n <= num_radios_k; ++n) {
        min_floor = std::min(min_floor, asymptotic_qm(FusionConfig(num_radios_k, n), pe).value());
    }
    if (target_qm.value() < min_floor) {
        throw InfeasibleTarget(target_qm, min_floor);
    }

    OptimalN out;
    out.table = crossover_table(num_radios_k, sensing, channel);
    out.n = num_radios_k;
    for (unsigned n = 1; n < num_radios_k; ++n) {
        if (target_qm.value() <= out.table.levels[n - 1]) {
            out.n = n;
            break;
        }
    }

    const LambdaRange range = search_range(sensing);
    double best_qf = 2.0;
    for (unsigned n = 1; n <= num_radios_k; ++n) {
        const ConstrainedOptimum opt =
            best_in_range(Rule{FusionConfig(num_radios_k, n), sensing, pe}, range, target_qm);
        out.per_rule.push_back(opt);
        if (opt.feasible && opt.qf < best_qf - kQfTieTolerance) {
            best_qf = opt.qf;
            out.direct_n = n;
        }
    }
    out.achieved = out.per_rule[out.n - 1];
    out.agreed = out.n == out.direct_n && out.achieved.feasible;
    return out;
}

} // namespace cssense
