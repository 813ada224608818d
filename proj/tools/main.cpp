// gbmlab command line: growth-rate analytics and Monte Carlo experiments for
// geometric Brownian motion. Subcommands: report, frontier, universes,
// error-envelope, simulate, kelly.
//
// Exit codes: 0 success, 2 usage or validation error, 3 output I/O error.
// All stochastic outputs are deterministic functions of the configuration and
// seed; --threads changes wall time only, never bytes.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gbmlab/analytics.hpp"
#include "gbmlab/experiments.hpp"
#include "gbmlab/simulate.hpp"
#include "gbmlab/table_io.hpp"

namespace {

using namespace gbmlab;

struct CommonOpts {
    std::string out = "-";
    std::string format_name = "csv";
    int precision = kDefaultPrecision;
    int threads = 0;
    std::uint64_t seed = 0;
    std::string config_path;
};

void add_output_options(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--out", opts.out, "Output path, '-' for standard output")
        ->capture_default_str();
    cmd->add_option("--format", opts.format_name, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--precision", opts.precision, "Significant digits for numeric output")
        ->check(CLI::Range(1, 17))
        ->capture_default_str();
    cmd->add_option("--threads", opts.threads, "Worker threads, 0 = all cores")
        ->capture_default_str();
    cmd->add_option("--config", opts.config_path,
                    "Flat key=value config file; flags override file values");
}

void add_seed_option(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--seed", opts.seed, "Master seed")->capture_default_str();
}

// Applies a flat key=value config file to options the command line left
// untouched, then enforces the per-command required flags. Keys are long
// option names without the leading dashes; '#' starts a comment.
void finish_config(CLI::App* cmd, const CommonOpts& opts,
                   const std::vector<std::string>& required) {
    if (!opts.config_path.empty()) {
        std::ifstream file(opts.config_path);
        if (!file) throw std::invalid_argument("cannot read config file: " + opts.config_path);
        std::string line;
        int line_no = 0;
        while (std::getline(file, line)) {
            ++line_no;
            const auto start = line.find_first_not_of(" \t");
            if (start == std::string::npos || line[start] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": expected key=value");
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t");
                const auto b = s.find_last_not_of(" \t");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key == "config") continue;
            CLI::Option* op = cmd->get_option_no_throw("--" + key);
            if (op == nullptr)
                throw std::invalid_argument("config: unknown key '" + key + "'");
            if (op->count() > 0) continue;  // flags override file values
            op->add_result(value);
            op->run_callback();
        }
    }
    for (const std::string& name : required) {
        if (cmd->get_option(name)->count() == 0)
            throw std::invalid_argument(name + " is required");
    }
}

// Writes the rendered output; never partially. Returns a process exit code.
int emit(const CommonOpts& opts, const std::string& content) {
    if (opts.out == "-") {
        std::cout << content;
        std::cout.flush();
        return 0;
    }
    std::ofstream file(opts.out, std::ios::binary | std::ios::trunc);
    if (!file) {
        std::cerr << "error: cannot open output path: " << opts.out << "\n";
        return 3;
    }
    file << content;
    file.flush();
    if (!file) {
        std::cerr << "error: failed writing output path: " << opts.out << "\n";
        return 3;
    }
    return 0;
}

std::string join_int64(const std::vector<std::int64_t>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) s += ",";
        s += std::to_string(xs[i]);
    }
    return s;
}

std::string join_doubles(const std::vector<double>& xs, int precision) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) s += ",";
        s += format_double(xs[i], precision);
    }
    return s;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportArgs {
    MarketModel market;
    CommonOpts common;
};

int run_report(const ReportArgs& args) {
    const MarketModel& market = args.market;
    market.validate();
    const double l_opt = optimal_leverage(market);
    const auto roots = critical_leverages(market);

    JsonObjectWriter json(args.common.precision);
    json.add("l_opt", l_opt);
    json.add("g_opt", levered_time_growth(market, Leverage{l_opt}));
    if (roots) {
        json.add("l_c_minus", roots->lower);
        json.add("l_c_plus", roots->upper);
    } else {
        json.add_null("l_c_minus");
        json.add_null("l_c_plus");
    }
    json.add("sharpe", market.mu_excess / market.sigma_m);
    json.add("t_c_l1", levered_horizon(market, Leverage{1.0}));
    json.add("t_c_lopt", levered_horizon(market, Leverage{l_opt}));
    return emit(args.common, json.str());
}

// ---------------------------------------------------------------------------
// frontier
// ---------------------------------------------------------------------------

struct FrontierArgs {
    MarketModel market;
    double sigma_lo = 0.0, sigma_hi = 0.5;
    double mu_lo = 0.0, mu_hi = 0.2;
    int resolution = 201;
    CommonOpts common;
};

int run_frontier(const FrontierArgs& args) {
    const SurfaceGrid surface =
        run_frontier_surface(args.market, {args.sigma_lo, args.sigma_hi, args.resolution},
                             {args.mu_lo, args.mu_hi, args.resolution});

    Metadata meta;
    meta.add("artifact", kArtifactId);
    meta.add("command", "frontier");
    meta.add("riskless", args.market.mu_riskless, args.common.precision);
    meta.add("excess", args.market.mu_excess, args.common.precision);
    meta.add("sigma-m", args.market.sigma_m, args.common.precision);
    meta.add("sigma-lo", args.sigma_lo, args.common.precision);
    meta.add("sigma-hi", args.sigma_hi, args.common.precision);
    meta.add("mu-lo", args.mu_lo, args.common.precision);
    meta.add("mu-hi", args.mu_hi, args.common.precision);
    meta.add("resolution", args.resolution);
    meta.add("format", args.common.format_name);
    meta.add("precision", args.common.precision);
    meta.add("derived.l_opt", optimal_leverage(args.market), args.common.precision);

    Table table;
    table.columns = {"record", "name", "sigma", "mu", "g"};
    for (std::size_t j = 0; j < surface.mu_axis.size(); ++j)
        for (std::size_t i = 0; i < surface.sigma_axis.size(); ++i)
            table.add_row({std::string("cell"), std::monostate{}, surface.sigma_axis[i],
                           surface.mu_axis[j], surface.at(i, j)});
    for (const auto& p : surface.frontier)
        table.add_row({std::string("frontier"), std::monostate{}, p.sigma, p.mu, std::monostate{}});
    for (const auto& p : surface.zero_growth)
        table.add_row({std::string("contour"), std::monostate{}, p.sigma, p.mu, std::monostate{}});
    for (const auto& m : surface.markers)
        table.add_row({std::string("marker"), m.name, m.sigma, m.mu, std::monostate{}});

    std::ostringstream out;
    write_table(out, meta, table, parse_output_format(args.common.format_name),
                args.common.precision);
    return emit(args.common, out.str());
}

// ---------------------------------------------------------------------------
// universes
// ---------------------------------------------------------------------------

struct UniversesArgs {
    GbmParams params;
    double horizon = 150.0;
    std::int64_t steps = 1500;
    std::vector<std::int64_t> ladder = {1, 10, 100, 1000, 10000};
    CommonOpts common;
};

int run_universes_cmd(const UniversesArgs& args) {
    const UniversesRun run = run_universes(args.params, args.horizon, args.steps, args.ladder,
                                           MasterSeed{args.common.seed}, args.common.threads);

    Metadata meta;
    meta.add("artifact", kArtifactId);
    meta.add("command", "universes");
    meta.add("mu", args.params.mu, args.common.precision);
    meta.add("sigma", args.params.sigma, args.common.precision);
    meta.add("T", args.horizon, args.common.precision);
    meta.add("steps", args.steps);
    meta.add("ladder", join_int64(args.ladder));
    meta.add("seed", static_cast<std::int64_t>(args.common.seed));
    meta.add("format", args.common.format_name);
    meta.add("precision", args.common.precision);
    meta.add("derived.t_c", run.min_horizon_marker, args.common.precision);
    meta.add("derived.g_time", time_average_growth_rate(args.params), args.common.precision);
    meta.add("derived.g_ensemble", ensemble_growth_rate(args.params), args.common.precision);

    Table table;
    table.columns = {"t", "exemplar"};
    for (std::int64_t n : args.ladder) table.columns.push_back("avg_" + std::to_string(n));
    for (std::size_t k = 0; k < run.times.size(); ++k) {
        std::vector<Cell> row;
        row.reserve(table.columns.size());
        row.emplace_back(run.times[k]);
        row.emplace_back(run.exemplar[k]);
        for (const auto& avg : run.averages) row.emplace_back(avg[k]);
        table.add_row(std::move(row));
    }

    std::ostringstream out;
    write_table(out, meta, table, parse_output_format(args.common.format_name),
                args.common.precision);
    return emit(args.common, out.str());
}

// ---------------------------------------------------------------------------
// error-envelope
// ---------------------------------------------------------------------------

struct EnvelopeArgs {
    GbmParams params;
    std::vector<double> horizons = {10.0, 100.0, 1000.0};
    std::int64_t samples = 1000;
    bool absolute = false;
    std::int64_t inset_points = 200;
    CommonOpts common;
};

int run_envelope_cmd(const EnvelopeArgs& args) {
    ErrorEnvelopeOptions options;
    options.absolute_errors = args.absolute;
    options.threads = args.common.threads;
    options.inset_points = args.inset_points;
    const ErrorEnvelopeRun run = run_error_envelope(args.params, args.horizons, args.samples,
                                                    MasterSeed{args.common.seed}, options);

    Metadata meta;
    meta.add("artifact", kArtifactId);
    meta.add("command", "error-envelope");
    meta.add("mu", args.params.mu, args.common.precision);
    meta.add("sigma", args.params.sigma, args.common.precision);
    meta.add("T-list", join_doubles(args.horizons, args.common.precision));
    meta.add("samples", args.samples);
    meta.add("absolute", static_cast<std::int64_t>(args.absolute ? 1 : 0));
    meta.add("inset-points", args.inset_points);
    meta.add("seed", static_cast<std::int64_t>(args.common.seed));
    meta.add("format", args.common.format_name);
    meta.add("precision", args.common.precision);
    meta.add("derived.g_time", time_average_growth_rate(args.params), args.common.precision);

    Table table;
    table.columns = {"record",       "T",            "index",        "value",
                     "envelope_one", "envelope_two", "coverage_one", "coverage_two"};
    for (const auto& per : run.horizons) {
        for (std::size_t j = 0; j < per.errors.size(); ++j)
            table.add_row({std::string("sample"), per.horizon, static_cast<std::int64_t>(j),
                           per.errors[j], std::monostate{}, std::monostate{}, std::monostate{},
                           std::monostate{}});
        table.add_row({std::string("summary"), per.horizon, std::monostate{}, std::monostate{},
                       per.envelope_one, per.envelope_two, per.coverage_one, per.coverage_two});
    }
    for (std::size_t k = 0; k < run.inset_times.size(); ++k)
        table.add_row({std::string("inset"), run.inset_times[k], static_cast<std::int64_t>(k),
                       run.inset_estimates[k], std::monostate{}, std::monostate{}, std::monostate{},
                       std::monostate{}});

    std::ostringstream out;
    write_table(out, meta, table, parse_output_format(args.common.format_name),
                args.common.precision);
    return emit(args.common, out.str());
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string mode = "exact";
    GbmParams params;
    MarketModel market;
    double leverage = 1.0;
    double horizon = 1.0;
    std::int64_t steps = 1;
    std::int64_t paths = 1000;
    std::string emit_kind = "terminals";
    CommonOpts common;
};

int run_simulate_cmd(const SimulateArgs& args) {
    const TimeGrid grid(args.horizon, args.steps);
    const bool rebalanced = args.mode == "rebalanced";
    EnsembleOptions options;
    options.threads = args.common.threads;

    Metadata meta;
    meta.add("artifact", kArtifactId);
    meta.add("command", "simulate");
    meta.add("mode", args.mode);
    if (rebalanced) {
        meta.add("riskless", args.market.mu_riskless, args.common.precision);
        meta.add("excess", args.market.mu_excess, args.common.precision);
        meta.add("sigma-m", args.market.sigma_m, args.common.precision);
        meta.add("leverage", args.leverage, args.common.precision);
    } else {
        meta.add("mu", args.params.mu, args.common.precision);
        meta.add("sigma", args.params.sigma, args.common.precision);
    }
    meta.add("T", args.horizon, args.common.precision);
    meta.add("steps", args.steps);
    meta.add("paths", args.paths);
    meta.add("emit", args.emit_kind);
    meta.add("seed", static_cast<std::int64_t>(args.common.seed));
    meta.add("format", args.common.format_name);
    meta.add("precision", args.common.precision);

    Table table;
    if (args.emit_kind == "terminals") {
        const EnsembleResult ensemble =
            rebalanced ? simulate_rebalanced_ensemble(args.market, Leverage{args.leverage}, grid,
                                                      MasterSeed{args.common.seed}, args.paths,
                                                      options)
                       : sample_ensemble(args.params, grid, MasterSeed{args.common.seed},
                                         args.paths, options);
        const GrowthEstimate est = growth_estimator(ensemble, grid.horizon);
        meta.add("derived.g_est", est.value, args.common.precision);
        meta.add("derived.bankrupt_paths", ensemble.bankrupt_paths);

        table.columns = {"path", "terminal_ratio", "log_growth"};
        for (std::size_t i = 0; i < ensemble.terminal_ratios.size(); ++i) {
            const double ratio = ensemble.terminal_ratios[i];
            table.add_row(
                {static_cast<std::int64_t>(i), ratio, std::log(ratio) / grid.horizon});
        }
    } else {
        // Full trajectories in long format, path by path.
        table.columns = {"path", "t", "value", "bankrupt"};
        std::int64_t bankrupt_paths = 0;
        for (std::int64_t i = 0; i < args.paths; ++i) {
            PathStream stream =
                substream(MasterSeed{args.common.seed}, static_cast<std::uint64_t>(i));
            const PathSample path =
                rebalanced
                    ? simulate_rebalanced(args.market, Leverage{args.leverage}, grid, stream)
                    : sample_path_exact(args.params, grid, stream);
            if (path.bankrupt) ++bankrupt_paths;
            for (std::int64_t k = 0; k < grid.points(); ++k)
                table.add_row({i, grid.time(k), path.values[static_cast<std::size_t>(k)],
                               static_cast<std::int64_t>(path.bankrupt ? 1 : 0)});
        }
        meta.add("derived.bankrupt_paths", bankrupt_paths);
    }

    std::ostringstream out;
    write_table(out, meta, table, parse_output_format(args.common.format_name),
                args.common.precision);
    return emit(args.common, out.str());
}

// ---------------------------------------------------------------------------
// kelly
// ---------------------------------------------------------------------------

struct KellyArgs {
    double p = 0.5;
    double fraction = 0.0;
    bool optimize = false;
    double period = 1.0;
    CommonOpts common;
};

int run_kelly_cmd(const KellyArgs& args) {
    if (!(args.p >= 0.0 && args.p <= 1.0))
        throw std::invalid_argument("kelly: --p must be in [0, 1]");

    double fraction = args.fraction;
    if (args.optimize) fraction = kelly_optimal_fraction(args.p).fraction;
    const DiscreteReturnDistribution dist{
        {{args.p, 1.0 + fraction}, {1.0 - args.p, 1.0 - fraction}}, args.period};

    JsonObjectWriter json(args.common.precision);
    json.add("p", args.p);
    json.add("fraction", fraction);
    json.add("growth", geometric_mean_growth(dist));
    return emit(args.common, json.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Growth-rate analytics and Monte Carlo experiments for geometric Brownian motion"};
    app.set_version_flag("--version", std::string(kArtifactId));
    app.require_subcommand(1);

    ReportArgs report_args;
    auto* report_cmd = app.add_subcommand(
        "report", "Optimal leverage, critical leverages, Sharpe ratio and horizons (JSON)");
    report_cmd->add_option("--riskless", report_args.market.mu_riskless, "Riskless rate");
    report_cmd->add_option("--excess", report_args.market.mu_excess, "Excess market drift");
    report_cmd->add_option("--sigma,--sigma-m", report_args.market.sigma_m, "Market volatility");
    add_output_options(report_cmd, report_args.common);

    FrontierArgs frontier_args;
    auto* frontier_cmd = app.add_subcommand(
        "frontier", "Growth-rate surface with efficient frontier, contour and markers");
    frontier_cmd->add_option("--riskless", frontier_args.market.mu_riskless, "Riskless rate");
    frontier_cmd->add_option("--excess", frontier_args.market.mu_excess, "Excess market drift");
    frontier_cmd->add_option("--sigma-m,--sigma", frontier_args.market.sigma_m,
                             "Market volatility");
    frontier_cmd->add_option("--sigma-lo", frontier_args.sigma_lo)->capture_default_str();
    frontier_cmd->add_option("--sigma-hi", frontier_args.sigma_hi)->capture_default_str();
    frontier_cmd->add_option("--mu-lo", frontier_args.mu_lo)->capture_default_str();
    frontier_cmd->add_option("--mu-hi", frontier_args.mu_hi)->capture_default_str();
    frontier_cmd->add_option("--resolution", frontier_args.resolution, "Samples per axis")
        ->check(CLI::Range(2, 100000))
        ->capture_default_str();
    add_output_options(frontier_cmd, frontier_args.common);

    UniversesArgs universes_args;
    auto* universes_cmd = app.add_subcommand(
        "universes", "Exemplar path vs equal-time averages over growing ensembles");
    universes_cmd->add_option("--mu", universes_args.params.mu, "Drift");
    universes_cmd->add_option("--sigma", universes_args.params.sigma, "Volatility");
    universes_cmd->add_option("--T", universes_args.horizon, "Horizon")->capture_default_str();
    universes_cmd->add_option("--steps", universes_args.steps, "Grid steps")
        ->capture_default_str();
    universes_cmd->add_option("--ladder", universes_args.ladder, "Path counts, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    add_seed_option(universes_cmd, universes_args.common);
    add_output_options(universes_cmd, universes_args.common);

    EnvelopeArgs envelope_args;
    auto* envelope_cmd = app.add_subcommand(
        "error-envelope", "Relative errors of single-path growth estimates and their envelopes");
    envelope_cmd->add_option("--mu", envelope_args.params.mu, "Drift");
    envelope_cmd->add_option("--sigma", envelope_args.params.sigma, "Volatility");
    envelope_cmd->add_option("--T-list", envelope_args.horizons, "Horizons, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    envelope_cmd->add_option("--samples", envelope_args.samples, "Samples per horizon")
        ->capture_default_str();
    envelope_cmd->add_flag("--absolute", envelope_args.absolute,
                           "Report absolute errors (required when the growth rate is 0)");
    envelope_cmd->add_option("--inset-points", envelope_args.inset_points,
                             "Points of the long-horizon series, 0 to disable")
        ->capture_default_str();
    add_seed_option(envelope_cmd, envelope_args.common);
    add_output_options(envelope_cmd, envelope_args.common);

    SimulateArgs simulate_args;
    auto* simulate_cmd =
        app.add_subcommand("simulate", "Monte Carlo ensembles: exact GBM or rebalanced leverage");
    simulate_cmd->add_option("--mode", simulate_args.mode)
        ->check(CLI::IsMember({"exact", "rebalanced"}))
        ->capture_default_str();
    simulate_cmd->add_option("--mu", simulate_args.params.mu, "Drift (exact mode)");
    simulate_cmd->add_option("--sigma", simulate_args.params.sigma, "Volatility (exact mode)");
    simulate_cmd->add_option("--riskless", simulate_args.market.mu_riskless,
                             "Riskless rate (rebalanced mode)");
    simulate_cmd->add_option("--excess", simulate_args.market.mu_excess,
                             "Excess market drift (rebalanced mode)");
    simulate_cmd->add_option("--sigma-m", simulate_args.market.sigma_m,
                             "Market volatility (rebalanced mode)");
    simulate_cmd->add_option("--leverage", simulate_args.leverage, "Leverage (rebalanced mode)")
        ->capture_default_str();
    simulate_cmd->add_option("--T", simulate_args.horizon, "Horizon")->capture_default_str();
    simulate_cmd->add_option("--steps", simulate_args.steps, "Grid steps")->capture_default_str();
    simulate_cmd->add_option("--paths", simulate_args.paths, "Ensemble size")
        ->capture_default_str();
    simulate_cmd->add_option("--emit", simulate_args.emit_kind, "Row layout")
        ->check(CLI::IsMember({"terminals", "trajectories"}))
        ->capture_default_str();
    add_seed_option(simulate_cmd, simulate_args.common);
    add_output_options(simulate_cmd, simulate_args.common);

    KellyArgs kelly_args;
    auto* kelly_cmd = app.add_subcommand(
        "kelly", "Geometric-mean growth of a double-or-nothing bet; optionally optimize");
    kelly_cmd->add_option("--p", kelly_args.p, "Win probability");
    auto* fraction_opt = kelly_cmd->add_option("--fraction", kelly_args.fraction, "Stake");
    auto* optimize_opt =
        kelly_cmd->add_flag("--optimize", kelly_args.optimize, "Find the optimal stake");
    fraction_opt->excludes(optimize_opt);
    kelly_cmd->add_option("--period", kelly_args.period, "Round duration")->capture_default_str();
    add_output_options(kelly_cmd, kelly_args.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (report_cmd->parsed()) {
            finish_config(report_cmd, report_args.common, {"--riskless", "--excess", "--sigma"});
            return run_report(report_args);
        }
        if (frontier_cmd->parsed()) {
            finish_config(frontier_cmd, frontier_args.common,
                          {"--riskless", "--excess", "--sigma-m"});
            return run_frontier(frontier_args);
        }
        if (universes_cmd->parsed()) {
            finish_config(universes_cmd, universes_args.common, {"--mu", "--sigma"});
            return run_universes_cmd(universes_args);
        }
        if (envelope_cmd->parsed()) {
            finish_config(envelope_cmd, envelope_args.common, {"--mu", "--sigma"});
            return run_envelope_cmd(envelope_args);
        }
        if (simulate_cmd->parsed()) {
            finish_config(simulate_cmd, simulate_args.common, {});
            return run_simulate_cmd(simulate_args);
        }
        if (kelly_cmd->parsed()) {
            finish_config(kelly_cmd, kelly_args.common, {"--p"});
            if (!kelly_args.optimize && fraction_opt->count() == 0)
                throw std::invalid_argument("kelly: pass --fraction or --optimize");
            return run_kelly_cmd(kelly_args);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
