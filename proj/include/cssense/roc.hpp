#ifndef CSSENSE_ROC_HPP
#define CSSENSE_ROC_HPP

#include "cssense/fusion.hpp"
#include "cssense/local_sensing.hpp"
#include "cssense/reporting.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace cssense {

/// Fused false-alarm differences at or below this are treated as ties.
inline constexpr double kQfTieTolerance = 1e-10;

struct RocPoint {
    double lambda;
    Probability pf_local;
    Probability pm_local;
    Probability qf;
    Probability qm;
};

/// Analytical ROC of one vote rule, swept over the detector threshold.
struct RocCurve {
    FusionConfig fusion;
    SensingParams sensing;  // threshold unused
    ReportChannel channel;
    std::vector<RocPoint> points;  // strictly increasing λ
    Probability qf_floor;
    Probability qm_floor;

    /// Linear interpolation of qf at a miss level; std::nullopt outside the
    /// curve's qm span.
    std::optional<double> qf_at_qm(double qm) const;

    /// Ordering, monotonicity and floor invariants.
    bool is_valid() const;
};

RocCurve analytic_roc(const FusionConfig& cfg, const SensingParams& sensing, const ReportChannel& channel,
                      std::span<const double> lambda_grid);

/// Threshold interval that covers the whole ROC: from λ = 0 up to where both
/// local_pf and local_pd have fallen to 1e-12.
struct LambdaRange {
    double lo;
    double hi;
};
LambdaRange search_range(const SensingParams& sensing);

/// Increasing λ grid whose points sit at thresholds for log-spaced P_f and
/// P_d values in [1e-12, 1), plus λ = 0; resolves both ends of the ROC.
std::vector<double> covering_lambda_grid(const SensingParams& sensing, std::size_t points_per_side);

/// Best rule-n operating point subject to qm <= target_qm.
struct ConstrainedOptimum {
    bool feasible = false;
    double lambda = 0.0;
    double qf = 1.0;
    double qm = 0.0;
};

/// Largest threshold in the search range whose fused miss stays within
/// target_qm; infeasible when even λ = 0 misses more often.
ConstrainedOptimum best_at_target(const FusionConfig& cfg, const SensingParams& sensing,
                                  const ReportChannel& channel, double target_qm);

enum class CrossoverKind {
    crossing,          // rule n+1 overtakes rule n at qm
    lower_dominates,   // rule n never worse (or tied)
    upper_dominates,   // rule n+1 better from the start of its curve
};

struct Crossover {
    CrossoverKind kind = CrossoverKind::lower_dominates;
    double qm = 1.0;      // crossing level; see CrossoverTable for the others
    double lambda = 0.0;  // rule n+1 threshold at the crossing
    double delta_qf = 0.0;

    bool found() const noexcept { return kind == CrossoverKind::crossing; }
};

/// Miss level at which rule n+1 starts to beat rule n in fused false alarm,
/// comparing both rules at equal qm. Requires 1 <= n <= K−1.
Crossover qm_star(unsigned num_radios_k, unsigned n, const SensingParams& sensing,
                  const ReportChannel& channel);

/// Q_m*(n) for n = 1..K−1. `levels[n-1]` is the crossing level, 1 when rule
/// n is never overtaken, or rule n+1's smallest qm when it always wins.
struct CrossoverTable {
    std::vector<Crossover> crossovers;
    std::vector<double> levels;
    bool monotone = true;
};

CrossoverTable crossover_table(unsigned num_radios_k, const SensingParams& sensing,
                               const ReportChannel& channel);

/// No vote rule can reach the requested miss level.
class InfeasibleTarget : public std::domain_error {
public:
    InfeasibleTarget(double target_qm, double min_achievable_qm);
    double min_achievable_qm() const noexcept { return min_qm_; }

private:
    double min_qm_;
};

struct OptimalN {
    unsigned n = 1;          // interval-rule choice
    unsigned direct_n = 1;   // brute constrained minimization choice
    bool agreed = true;
    CrossoverTable table;
    ConstrainedOptimum achieved;  // operating point of the chosen rule
    std::vector<ConstrainedOptimum> per_rule;  // index n−1
};

/// Adaptive vote threshold for a target fused miss probability: the
/// smallest n with target <= Q_m*(n), else K. Also runs the direct search
/// over (n, λ) and reports whether both agree. Ties in qf go to smaller n.
/// Throws std::domain_error unless 0 < target < 1 and InfeasibleTarget when
/// the target lies below every rule's miss floor.
OptimalN optimal_n(Probability target_qm, unsigned num_radios_k, const SensingParams& sensing,
                   const ReportChannel& channel);

} // namespace cssense

#endif // CSSENSE_ROC_HPP
