#ifndef CSSENSE_CLI_HPP
#define CSSENSE_CLI_HPP

#include "cssense/reporting.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cssense::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kIoError = 3, kInfeasible = 4 };

enum class OutputFormat { csv, json };

/// "lo:hi:count" threshold sweep: linear in λ, or log-spaced in P_f.
struct GridSpec {
    enum class Kind { lambda_linear, pf_log };
    Kind kind = Kind::lambda_linear;
    double lo = 0.0;
    double hi = 0.0;
    unsigned count = 1;
};

/// Parsed command-line/config-file parameters. Decibel values stay in dB
/// here; conversion happens when the model objects are built.
struct RunConfig {
    unsigned k = 4;
    std::vector<unsigned> n;
    unsigned samples_m = 6;
    double snr_db = 20.0;
    std::optional<double> report_snr_db;
    bool perfect_report = false;
    std::optional<double> lambda;
    std::optional<GridSpec> grid;
    std::optional<double> target_qm;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out;
    OutputFormat format = OutputFormat::csv;
};

/// Invalid or inconsistent configuration; `field` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Output path could not be written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

GridSpec parse_grid(const std::string& text, GridSpec::Kind kind, const std::string& field);

ReportChannel make_channel(const RunConfig& cfg);

/// Thresholds for sweep commands, strictly increasing.
std::vector<double> resolve_lambdas(const RunConfig& cfg);

std::string cmd_analyze(const RunConfig& cfg);
std::string cmd_roc(const RunConfig& cfg);
std::string cmd_simulate(const RunConfig& cfg);
std::string cmd_optimal_n(const RunConfig& cfg);

/// Full entry point: parses argv (plus --config), dispatches the subcommand,
/// writes to --out or `out`, and maps failures onto ExitCode values.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace cssense::cli

#endif // CSSENSE_CLI_HPP
