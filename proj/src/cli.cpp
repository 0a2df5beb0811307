#include "cssense/cli.hpp"

#include "cssense/fusion.hpp"
#include "cssense/local_sensing.hpp"
#include "cssense/montecarlo.hpp"
#include "cssense/roc.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace cssense::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt_prob(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// JSON numbers carry the same digits as the CSV text.
double json_prob(double v) {
    return std::strtod(fmt_prob(v).c_str(), nullptr);
}

SensingParams make_sensing(const RunConfig& cfg, double lambda) {
    if (cfg.samples_m < 1) {
        throw ConfigError("samples-m", "must be at least 1");
    }
    if (!std::isfinite(cfg.snr_db)) {
        throw ConfigError("snr-db", "must be finite");
    }
    return SensingParams::from_db(cfg.samples_m, lambda, cfg.snr_db);
}

std::vector<unsigned> vote_thresholds(const RunConfig& cfg) {
    if (cfg.k < 1) {
        throw ConfigError("k", "must be at least 1");
    }
    std::vector<unsigned> ns = cfg.n;
    if (ns.empty()) {
        for (unsigned n = 1; n <= cfg.k; ++n) {
            ns.push_back(n);
        }
    }
    for (unsigned n : ns) {
        if (n < 1 || n > cfg.k) {
            throw ConfigError("n", "vote threshold " + std::to_string(n) + " outside [1, " +
                                       std::to_string(cfg.k) + "]");
        }
    }
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    return ns;
}

struct Row {
    unsigned n;
    double lambda;
    double pf_local;
    double pm_local;
    double pe;
    double qf;
    double qm;
    double qf_floor;
    double qm_floor;
    std::optional<SimResult> sim;
};

Row analytic_row(const FusionConfig& fusion, const SensingParams& sensing, const ReportChannel& channel) {
    const Probability pe = channel.error_probability();
    const Probability pf = local_pf(sensing);
    const Probability pm = local_pm(sensing);
    return {fusion.vote_threshold(),
            sensing.threshold(),
            pf,
            pm,
            pe,
            fused_qf(fusion, pf, pe),
            fused_qm(fusion, pm, pe),
            asymptotic_qf(fusion, pe),
            asymptotic_qm(fusion, pe),
            std::nullopt};
}

std::string render_rows(const std::vector<Row>& rows, OutputFormat format, const char* command) {
    const bool with_sim = !rows.empty() && rows.front().sim.has_value();
    if (format == OutputFormat::json) {
        Json doc;
        doc["command"] = command;
        Json arr = Json::array();
        for (const Row& r : rows) {
            Json o;
            o["n"] = r.n;
            o["lambda"] = r.lambda;
            o["pf_local"] = json_prob(r.pf_local);
            o["pm_local"] = json_prob(r.pm_local);
            o["pe"] = json_prob(r.pe);
            o["qf"] = json_prob(r.qf);
            o["qm"] = json_prob(r.qm);
            o["qf_floor"] = json_prob(r.qf_floor);
            o["qm_floor"] = json_prob(r.qm_floor);
            if (r.sim) {
                o["qf_hat"] = json_prob(r.sim->fused.qf);
                o["qm_hat"] = json_prob(r.sim->fused.qm);
                o["qf_stderr"] = json_prob(r.sim->fused.qf_stderr);
                o["qm_stderr"] = json_prob(r.sim->fused.qm_stderr);
                o["trials_h0"] = r.sim->fused.trials_h0;
                o["trials_h1"] = r.sim->fused.trials_h1;
            }
            arr.push_back(std::move(o));
        }
        doc["rows"] = std::move(arr);
        return doc.dump(2) + "\n";
    }

    std::ostringstream os;
    os << "n,lambda,pf_local,pm_local,pe,qf,qm,qf_floor,qm_floor";
    if (with_sim) {
        os << ",qf_hat,qm_hat,qf_stderr,qm_stderr,trials_h0,trials_h1";
    }
    os << '\n';
    for (const Row& r : rows) {
        os << r.n << ',' << fmt_exact(r.lambda) << ',' << fmt_prob(r.pf_local) << ',' << fmt_prob(r.pm_local)
           << ',' << fmt_prob(r.pe) << ',' << fmt_prob(r.qf) << ',' << fmt_prob(r.qm) << ','
           << fmt_prob(r.qf_floor) << ',' << fmt_prob(r.qm_floor);
        if (r.sim) {
            os << ',' << fmt_prob(r.sim->fused.qf) << ',' << fmt_prob(r.sim->fused.qm) << ','
               << fmt_prob(r.sim->fused.qf_stderr) << ',' << fmt_prob(r.sim->fused.qm_stderr) << ','
               << r.sim->fused.trials_h0 << ',' << r.sim->fused.trials_h1;
        }
        os << '\n';
    }
    return os.str();
}

std::string render_pairs(const std::vector<std::pair<std::string, Json>>& pairs, OutputFormat format) {
    if (format == OutputFormat::json) {
        Json doc = Json::object();
        for (const auto& [key, value] : pairs) {
            doc[key] = value;
        }
        return doc.dump(2) + "\n";
    }
    std::ostringstream os;
    for (const auto& [key, value] : pairs) {
        os << key << '=';
        if (value.is_string()) {
            os << value.get<std::string>();
        } else if (value.is_number_float()) {
            os << fmt_prob(value.get<double>());
        } else {
            os << value.dump();
        }
        os << '\n';
    }
    return os.str();
}

const char* crossover_name(CrossoverKind kind) {
    switch (kind) {
    case CrossoverKind::crossing:
        return "crossing";
    case CrossoverKind::lower_dominates:
        return "lower_dominates";
    case CrossoverKind::upper_dominates:
        return "upper_dominates";
    }
    return "unknown";
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot open output file '" + path + "'");
    }
    file << text;
    file.flush();
    if (!file) {
        throw IoError("failed writing output file '" + path + "'");
    }
}

} // namespace

GridSpec parse_grid(const std::string& text, GridSpec::Kind kind, const std::string& field) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) {
        parts.push_back(item);
    }
    if (parts.size() != 3) {
        throw ConfigError(field, "expected lo:hi:count, got '" + text + "'");
    }
    GridSpec g;
    g.kind = kind;
    try {
        std::size_t used = 0;
        g.lo = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("lo");
        g.hi = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("hi");
        const long count = std::stol(parts[2], &used);
        if (used != parts[2].size() || count < 1) throw std::invalid_argument("count");
        g.count = static_cast<unsigned>(count);
    } catch (const std::exception&) {
        throw ConfigError(field, "malformed grid '" + text + "'");
    }
    if (!std::isfinite(g.lo) || !std::isfinite(g.hi) || g.hi < g.lo || (g.count > 1 && !(g.hi > g.lo))) {
        throw ConfigError(field, "grid bounds must satisfy lo < hi (or lo == hi with count 1)");
    }
    if (g.count == 1 && g.hi != g.lo) {
        throw ConfigError(field, "a 1-point grid needs lo == hi");
    }
    if (kind == GridSpec::Kind::lambda_linear && g.lo < 0.0) {
        throw ConfigError(field, "thresholds must be nonnegative");
    }
    if (kind == GridSpec::Kind::pf_log && (!(g.lo > 0.0) || !(g.hi < 1.0))) {
        throw ConfigError(field, "false-alarm grid must lie strictly inside (0, 1)");
    }
    return g;
}

ReportChannel make_channel(const RunConfig& cfg) {
    if (cfg.perfect_report && cfg.report_snr_db) {
        throw ConfigError("report-snr-db", "give either --report-snr-db or --perfect-report, not both");
    }
    if (cfg.perfect_report) {
        return ReportChannel::perfect();
    }
    if (!cfg.report_snr_db) {
        throw ConfigError("report-snr-db", "reporting channel not set (use --report-snr-db or --perfect-report)");
    }
    if (!std::isfinite(*cfg.report_snr_db)) {
        throw ConfigError("report-snr-db", "must be finite");
    }
    return ReportChannel::from_snr_db(*cfg.report_snr_db);
}

std::vector<double> resolve_lambdas(const RunConfig& cfg) {
    if (cfg.lambda && cfg.grid) {
        throw ConfigError("lambda-grid", "give exactly one of --lambda, --lambda-grid, --pf-grid");
    }
    if (cfg.lambda) {
        if (!(*cfg.lambda >= 0.0) || !std::isfinite(*cfg.lambda)) {
            throw ConfigError("lambda", "must be finite and nonnegative");
        }
        return {*cfg.lambda};
    }
    if (!cfg.grid) {
        throw ConfigError("lambda-grid", "a sweep needs --lambda-grid or --pf-grid");
    }
    const GridSpec& g = *cfg.grid;
    std::vector<double> lambdas;
    lambdas.reserve(g.count);
    for (unsigned i = 0; i < g.count; ++i) {
        const double t = g.count == 1 ? 0.0 : static_cast<double>(i) / (g.count - 1);
        if (g.kind == GridSpec::Kind::lambda_linear) {
            lambdas.push_back(g.lo + t * (g.hi - g.lo));
        } else {
            const double pf = std::exp(std::log(g.lo) + t * (std::log(g.hi) - std::log(g.lo)));
            lambdas.push_back(threshold_for_pf(Probability(pf), cfg.samples_m));
        }
    }
    std::sort(lambdas.begin(), lambdas.end());
    for (std::size_t i = 1; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > lambdas[i - 1])) {
            throw ConfigError(g.kind == GridSpec::Kind::pf_log ? "pf-grid" : "lambda-grid",
                              "grid points collapse to duplicate thresholds");
        }
    }
    return lambdas;
}

std::string cmd_analyze(const RunConfig& cfg) {
    if (cfg.n.size() != 1) {
        throw ConfigError("n", "analyze needs exactly one --n");
    }
    if (!cfg.lambda) {
        throw ConfigError("lambda", "analyze needs --lambda");
    }
    const auto ns = vote_thresholds(cfg);
    const FusionConfig fusion(cfg.k, ns.front());
    const ReportChannel channel = make_channel(cfg);
    const auto lambdas = resolve_lambdas(cfg);
    const SensingParams sensing = make_sensing(cfg, lambdas.front());
    const Row r = analytic_row(fusion, sensing, channel);
    return render_pairs({{"k", cfg.k},
                         {"n", r.n},
                         {"samples_m", cfg.samples_m},
                         {"avg_snr", json_prob(sensing.avg_snr())},
                         {"lambda", r.lambda},
                         {"pf", json_prob(r.pf_local)},
                         {"pm", json_prob(r.pm_local)},
                         {"pe", json_prob(r.pe)},
                         {"qf", json_prob(r.qf)},
                         {"qm", json_prob(r.qm)},
                         {"qf_floor", json_prob(r.qf_floor)},
                         {"qm_floor", json_prob(r.qm_floor)}},
                        cfg.format);
}

std::string cmd_roc(const RunConfig& cfg) {
    const auto ns = vote_thresholds(cfg);
    const ReportChannel channel = make_channel(cfg);
    const auto lambdas = resolve_lambdas(cfg);
    const SensingParams sensing = make_sensing(cfg, 0.0);
    std::vector<Row> rows;
    for (unsigned n : ns) {
        const FusionConfig fusion(cfg.k, n);
        for (double lambda : lambdas) {
            rows.push_back(analytic_row(fusion, sensing.with_threshold(lambda), channel));
        }
    }
    return render_rows(rows, cfg.format, "roc");
}

std::string cmd_simulate(const RunConfig& cfg) {
    if (cfg.trials < 1) {
        throw ConfigError("trials", "must be at least 1");
    }
    const auto ns = vote_thresholds(cfg);
    const ReportChannel channel = make_channel(cfg);
    const auto lambdas = resolve_lambdas(cfg);
    const SensingParams sensing = make_sensing(cfg, 0.0);
    std::vector<Row> rows;
    for (unsigned n : ns) {
        const FusionConfig fusion(cfg.k, n);
        const SimScenario scenario{sensing, channel, fusion, cfg.trials, cfg.seed};
        const auto results = run_sweep(scenario, lambdas, SimOptions{cfg.threads});
        for (std::size_t j = 0; j < lambdas.size(); ++j) {
            Row r = analytic_row(fusion, sensing.with_threshold(lambdas[j]), channel);
            r.sim = results[j];
            rows.push_back(r);
        }
    }
    return render_rows(rows, cfg.format, "simulate");
}

std::string cmd_optimal_n(const RunConfig& cfg) {
    if (!cfg.target_qm) {
        throw ConfigError("target-qm", "optimal-n needs --target-qm");
    }
    if (!(*cfg.target_qm > 0.0 && *cfg.target_qm < 1.0)) {
        throw ConfigError("target-qm", "must lie strictly inside (0, 1)");
    }
    if (cfg.k < 1) {
        throw ConfigError("k", "must be at least 1");
    }
    const ReportChannel channel = make_channel(cfg);
    const SensingParams sensing = make_sensing(cfg, 0.0);
    const OptimalN result = optimal_n(Probability(*cfg.target_qm), cfg.k, sensing, channel);

    std::vector<std::pair<std::string, Json>> pairs{
        {"target_qm", json_prob(*cfg.target_qm)},
        {"k", cfg.k},
        {"pe", json_prob(channel.error_probability())},
        {"n", result.n},
        {"direct_n", result.direct_n},
        {"agreed", result.agreed},
        {"table_monotone", result.table.monotone},
    };
    for (std::size_t i = 0; i < result.table.levels.size(); ++i) {
        const std::string idx = std::to_string(i + 1);
        pairs.emplace_back("qm_star_" + idx, json_prob(result.table.levels[i]));
        pairs.emplace_back("crossover_" + idx, crossover_name(result.table.crossovers[i].kind));
    }
    pairs.emplace_back("lambda", result.achieved.lambda);
    pairs.emplace_back("qf", json_prob(result.achieved.qf));
    pairs.emplace_back("qm", json_prob(result.achieved.qm));
    return render_pairs(pairs, cfg.format);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cooperative spectrum sensing: closed forms, Monte Carlo, ROC sweeps and vote-rule selection"};
    app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
    app.fallthrough();
    app.require_subcommand(1);

    RunConfig cfg;
    std::string lambda_grid;
    std::string pf_grid;
    std::string format = "csv";

    app.add_option("--k", cfg.k, "Number of cognitive radios K");
    app.add_option("--n", cfg.n, "Vote threshold n (repeatable)");
    app.add_option("--samples-m", cfg.samples_m, "Samples per sensing event M");
    app.add_option("--snr-db", cfg.snr_db, "Average sensing SNR in dB");
    app.add_option("--report-snr-db", cfg.report_snr_db, "Reporting SNR_r = 10 log10(1/sigma^2) in dB");
    app.add_flag("--perfect-report", cfg.perfect_report, "Error-free reporting channel (P_e = 0)");
    app.add_option("--lambda", cfg.lambda, "Detector threshold");
    app.add_option("--lambda-grid", lambda_grid, "Linear threshold grid lo:hi:count");
    app.add_option("--pf-grid", pf_grid, "Log-spaced local false-alarm grid lo:hi:count");
    app.add_option("--target-qm", cfg.target_qm, "Target fused miss-detection probability");
    app.add_option("--trials", cfg.trials, "Monte Carlo trials");
    app.add_option("--seed", cfg.seed, "Monte Carlo seed");
    app.add_option("--threads", cfg.threads, "Simulation worker threads (0 = all cores)");
    app.add_option("--out", cfg.out, "Output path (default stdout)");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    auto* analyze = app.add_subcommand("analyze", "Closed-form performance at one operating point");
    auto* roc = app.add_subcommand("roc", "Analytical ROC sweep");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo sweep next to the closed forms");
    auto* optimal = app.add_subcommand("optimal-n", "Adaptive vote threshold for a target miss level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        cfg.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
        if (!lambda_grid.empty() && !pf_grid.empty()) {
            throw ConfigError("pf-grid", "give exactly one of --lambda-grid and --pf-grid");
        }
        if (!lambda_grid.empty()) {
            cfg.grid = parse_grid(lambda_grid, GridSpec::Kind::lambda_linear, "lambda-grid");
        } else if (!pf_grid.empty()) {
            cfg.grid = parse_grid(pf_grid, GridSpec::Kind::pf_log, "pf-grid");
        }

        std::string text;
        if (analyze->parsed()) {
            text = cmd_analyze(cfg);
        } else if (roc->parsed()) {
            text = cmd_roc(cfg);
        } else if (simulate->parsed()) {
            text = cmd_simulate(cfg);
        } else if (optimal->parsed()) {
            text = cmd_optimal_n(cfg);
        }
        write_output(text, cfg.out, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return kIoError;
    } catch (const InfeasibleTarget& e) {
        err << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::domain_error& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    return kOk;
}

} // namespace cssense::cli
