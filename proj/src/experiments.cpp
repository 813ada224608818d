#include "gbmlab/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "gbmlab/parallel.hpp"

namespace gbmlab {

std::vector<double> AxisRange::samples() const {
    validate();
    std::vector<double> xs(static_cast<std::size_t>(count));
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (int i = 0; i < count; ++i) xs[static_cast<std::size_t>(i)] = lo + step * i;
    xs.back() = hi;
    return xs;
}

SurfaceGrid run_frontier_surface(const MarketModel& market, const AxisRange& sigma_range,
                                 const AxisRange& mu_range) {
    market.validate();
    SurfaceGrid surface;
    surface.market = market;
    surface.sigma_axis = sigma_range.samples();
    surface.mu_axis = mu_range.samples();

    const std::size_t n_sigma = surface.sigma_axis.size();
    const std::size_t n_mu = surface.mu_axis.size();
    surface.growth.resize(n_sigma * n_mu);
    for (std::size_t j = 0; j < n_mu; ++j)
        for (std::size_t i = 0; i < n_sigma; ++i)
            surface.growth[j * n_sigma + i] =
                surface.mu_axis[j] - 0.5 * surface.sigma_axis[i] * surface.sigma_axis[i];

    const double slope = market.mu_excess / market.sigma_m;
    surface.frontier.reserve(n_sigma);
    surface.zero_growth.reserve(n_sigma);
    for (double s : surface.sigma_axis) {
        surface.frontier.push_back({s, market.mu_riskless + s * slope});
        surface.zero_growth.push_back({s, 0.5 * s * s});
    }

    const double l_opt = optimal_leverage(market);
    surface.markers.push_back({"R", 0.0, market.mu_riskless});
    surface.markers.push_back({"M", market.sigma_m, market.mu_riskless + market.mu_excess});
    surface.markers.push_back(
        {"l_opt", l_opt * market.sigma_m, market.mu_riskless + l_opt * market.mu_excess});
    return surface;
}

UniversesRun run_universes(const GbmParams& params, double horizon, std::int64_t steps,
                           std::span<const std::int64_t> ladder, MasterSeed seed, int threads) {
    params.validate();
    if (ladder.empty()) throw std::invalid_argument("run_universes: empty ladder");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (ladder[i] < 1) throw std::invalid_argument("run_universes: ladder entries must be >= 1");
        if (i > 0 && ladder[i] <= ladder[i - 1])
            throw std::invalid_argument("run_universes: ladder must be strictly increasing");
    }

    const TimeGrid grid(horizon, steps);
    UniversesRun run{params, seed, grid, {}, {}, {ladder.begin(), ladder.end()}, {}, 0.0};
    run.min_horizon_marker = min_horizon(params);

    run.times.resize(static_cast<std::size_t>(grid.points()));
    for (std::int64_t k = 0; k < grid.points(); ++k)
        run.times[static_cast<std::size_t>(k)] = grid.time(k);

    PathStream exemplar_stream = substream(seed, 0);
    run.exemplar = sample_path_exact(params, grid, exemplar_stream).values;

    EnsembleOptions options;
    options.average_trajectory = true;
    options.threads = threads;
    run.averages.reserve(ladder.size());
    for (std::int64_t n : ladder) {
        // Every level reruns the prefix 0..n-1 of the same pool; substreams
        // make regeneration cheaper than holding all paths in memory.
        run.averages.push_back(
            sample_ensemble(params, grid, seed, n, options).mean_trajectory);
    }
    return run;
}

ErrorEnvelopeRun run_error_envelope(const GbmParams& params, std::span<const double> horizons,
                                    std::int64_t samples_per_horizon, MasterSeed seed,
                                    const ErrorEnvelopeOptions& options) {
    params.validate();
    if (horizons.empty()) throw std::invalid_argument("run_error_envelope: no horizons");
    for (double t : horizons)
        if (!(t > 0.0) || !std::isfinite(t))
            throw std::invalid_argument("run_error_envelope: horizons must be > 0");
    if (samples_per_horizon < 100)
        throw std::invalid_argument("run_error_envelope: need at least 100 samples per horizon");

    const double g = time_average_growth_rate(params);
    if (g == 0.0 && !options.absolute_errors)
        throw std::domain_error(
            "run_error_envelope: growth rate is 0, relative errors undefined; "
            "request absolute errors instead");

    ErrorEnvelopeRun run;
    run.params = params;
    run.seed = seed;
    run.absolute = options.absolute_errors;
    run.horizons.resize(horizons.size());

    const double scale = options.absolute_errors ? 1.0 : std::abs(g);
    for (std::size_t t = 0; t < horizons.size(); ++t) {
        auto& per = run.horizons[t];
        per.horizon = horizons[t];
        per.envelope_one = params.sigma / std::sqrt(per.horizon) / scale;
        per.envelope_two = 2.0 * per.envelope_one;
        per.errors.resize(static_cast<std::size_t>(samples_per_horizon));

        // One exact terminal draw per sample: ln p(T) = g T + sigma sqrt(T) Z.
        const double log_drift = g * per.horizon;
        const double log_sd = params.sigma * std::sqrt(per.horizon);
        const std::uint64_t base =
            static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(samples_per_horizon);
        for_each_block(samples_per_horizon, kReductionBlock, options.threads,
                       [&](std::int64_t, std::int64_t begin, std::int64_t end) {
                           for (std::int64_t j = begin; j < end; ++j) {
                               PathStream stream =
                                   substream(seed, base + static_cast<std::uint64_t>(j));
                               const double log_ratio = log_drift + log_sd * stream.next_normal();
                               const double estimate = log_ratio / per.horizon;
                               const double err = options.absolute_errors
                                                      ? estimate - g
                                                      : (estimate - g) / g;
                               per.errors[static_cast<std::size_t>(j)] = err;
                           }
                       });

        std::int64_t in_one = 0;
        std::int64_t in_two = 0;
        for (double e : per.errors) {
            if (std::abs(e) <= per.envelope_one) ++in_one;
            if (std::abs(e) <= per.envelope_two) ++in_two;
        }
        per.coverage_one = static_cast<double>(in_one) / static_cast<double>(samples_per_horizon);
        per.coverage_two = static_cast<double>(in_two) / static_cast<double>(samples_per_horizon);
    }

    // Long-horizon series of one additional path: the estimate settles onto
    // the time-average growth rate as T grows.
    const double t_c = min_horizon(params);
    if (options.inset_points > 0 && std::isfinite(t_c)) {
        const std::uint64_t inset_index =
            static_cast<std::uint64_t>(horizons.size()) *
            static_cast<std::uint64_t>(samples_per_horizon);
        PathStream stream = substream(seed, inset_index);
        const double t_lo = t_c / 10.0;
        const double t_hi = 100.0 * t_c;
        const double ratio = std::pow(t_hi / t_lo,
                                      1.0 / static_cast<double>(options.inset_points - 1));
        run.inset_times.resize(static_cast<std::size_t>(options.inset_points));
        run.inset_estimates.resize(static_cast<std::size_t>(options.inset_points));
        double log_p = 0.0;
        double t_prev = 0.0;
        double t_k = t_lo;
        for (std::int64_t k = 0; k < options.inset_points; ++k, t_k *= ratio) {
            const double dt = t_k - t_prev;
            log_p += g * dt + params.sigma * std::sqrt(dt) * stream.next_normal();
            run.inset_times[static_cast<std::size_t>(k)] = t_k;
            run.inset_estimates[static_cast<std::size_t>(k)] = log_p / t_k;
            t_prev = t_k;
        }
    }
    return run;
}

LeverageReport leverage_report(const MarketModel& market, const AxisRange& l_range) {
    market.validate();
    LeverageReport report;
    report.market = market;
    report.l_opt = optimal_leverage(market);
    report.growth_at_opt = levered_time_growth(market, Leverage{report.l_opt});
    report.critical = critical_leverages(market);
    report.sharpe = market.mu_excess / market.sigma_m;
    report.horizon_l1 = levered_horizon(market, Leverage{1.0});
    report.horizon_at_opt = levered_horizon(market, Leverage{report.l_opt});

    std::vector<double> ls = l_range.samples();
    if (report.critical) {
        ls.push_back(report.critical->lower);
        ls.push_back(report.critical->upper);
    }
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());

    report.horizon_curve.reserve(ls.size());
    for (double l : ls) {
        report.horizon_curve.push_back({l, levered_time_growth(market, Leverage{l}),
                                        levered_horizon(market, Leverage{l})});
    }
    return report;
}

}  // namespace gbmlab
