#include "gbmlab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gbmlab/parallel.hpp"

namespace gbmlab {

namespace {

// Per-step constants of the exact lognormal transition. Both the plain GBM
// path and the market sleeve of the rebalanced simulator go through this
// kernel, so a leverage-1 portfolio reproduces the exact path bit for bit.
struct StepKernel {
    double drift_dt;
    double vol_sqrt_dt;

    StepKernel(const GbmParams& p, double dt)
        : drift_dt((p.mu - 0.5 * p.sigma * p.sigma) * dt), vol_sqrt_dt(p.sigma * std::sqrt(dt)) {}

    double exponent(double z) const { return drift_dt + vol_sqrt_dt * z; }
    double factor(double z) const { return std::exp(exponent(z)); }
};

struct RebalanceKernel {
    StepKernel market;
    double riskless_factor;
    double l;

    RebalanceKernel(const MarketModel& m, Leverage lev, double dt)
        : market(GbmParams{m.mu_riskless + m.mu_excess, m.sigma_m}, dt),
          riskless_factor(std::exp(m.mu_riskless * dt)),
          l(lev.value) {}

    double factor(double z) const {
        return (1.0 - l) * riskless_factor + l * market.factor(z);
    }
};

template <typename NextNormal>
void fill_exact_path(const StepKernel& kernel, std::int64_t steps, NextNormal&& draw,
                     std::vector<double>& values) {
    values.resize(static_cast<std::size_t>(steps) + 1);
    double p = 1.0;
    values[0] = p;
    for (std::int64_t k = 0; k < steps; ++k) {
        p *= kernel.factor(draw());
        values[static_cast<std::size_t>(k) + 1] = p;
    }
}

template <typename NextNormal>
bool fill_rebalanced_path(const RebalanceKernel& kernel, std::int64_t steps, NextNormal&& draw,
                          std::vector<double>& values) {
    values.resize(static_cast<std::size_t>(steps) + 1);
    double w = 1.0;
    bool bankrupt = false;
    values[0] = w;
    for (std::int64_t k = 0; k < steps; ++k) {
        const double z = draw();  // consumed even after bankruptcy
        if (!bankrupt) {
            w *= kernel.factor(z);
            if (!(w > 0.0)) {
                w = 0.0;
                bankrupt = true;
            }
        }
        values[static_cast<std::size_t>(k) + 1] = w;
    }
    return bankrupt;
}

void check_normals(std::span<const double> normals, const TimeGrid& grid) {
    if (static_cast<std::int64_t>(normals.size()) != grid.steps)
        throw std::invalid_argument("path sampling: need exactly one normal per step");
}

}  // namespace

PathSample sample_path_exact(const GbmParams& params, const TimeGrid& grid, PathStream& stream) {
    params.validate();
    grid.validate();
    PathSample path{grid, {}, stream.path_index(), false};
    const StepKernel kernel(params, grid.dt());
    fill_exact_path(kernel, grid.steps, [&] { return stream.next_normal(); }, path.values);
    return path;
}

PathSample sample_path_exact(const GbmParams& params, const TimeGrid& grid,
                             std::span<const double> normals) {
    params.validate();
    grid.validate();
    check_normals(normals, grid);
    PathSample path{grid, {}, 0, false};
    const StepKernel kernel(params, grid.dt());
    std::size_t next = 0;
    fill_exact_path(kernel, grid.steps, [&] { return normals[next++]; }, path.values);
    return path;
}

PathSample simulate_rebalanced(const MarketModel& market, Leverage l, const TimeGrid& grid,
                               PathStream& stream) {
    market.validate();
    l.validate();
    grid.validate();
    PathSample path{grid, {}, stream.path_index(), false};
    const RebalanceKernel kernel(market, l, grid.dt());
    path.bankrupt =
        fill_rebalanced_path(kernel, grid.steps, [&] { return stream.next_normal(); }, path.values);
    return path;
}

PathSample simulate_rebalanced(const MarketModel& market, Leverage l, const TimeGrid& grid,
                               std::span<const double> normals) {
    market.validate();
    l.validate();
    grid.validate();
    check_normals(normals, grid);
    PathSample path{grid, {}, 0, false};
    const RebalanceKernel kernel(market, l, grid.dt());
    std::size_t next = 0;
    path.bankrupt =
        fill_rebalanced_path(kernel, grid.steps, [&] { return normals[next++]; }, path.values);
    return path;
}

GrowthEstimate growth_estimator(const EnsembleResult& ensemble, double horizon) {
    if (ensemble.terminal_ratios.empty())
        throw std::invalid_argument("growth_estimator: empty ensemble");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("growth_estimator: horizon must be > 0");
    for (double r : ensemble.terminal_ratios)
        if (r < 0.0) throw std::invalid_argument("growth_estimator: negative terminal ratio");

    const auto n = static_cast<std::int64_t>(ensemble.terminal_ratios.size());
    const double mean = blocked_mean(ensemble.terminal_ratios);

    GrowthEstimate est;
    est.horizon = horizon;
    est.paths = n;
    est.value = mean == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(mean) / horizon;
    est.std_error = std::numeric_limits<double>::quiet_NaN();
    if (n >= 2 && mean > 0.0) {
        NeumaierSum sq;
        for (double r : ensemble.terminal_ratios) {
            const double d = r - mean;
            sq.add(d * d);
        }
        const double sd = std::sqrt(sq.value() / static_cast<double>(n - 1));
        est.std_error = sd / (mean * std::sqrt(static_cast<double>(n)) * horizon);
    }
    return est;
}

std::vector<double> average_universes(std::span<const PathSample> paths) {
    if (paths.empty()) throw std::invalid_argument("average_universes: no paths");
    const TimeGrid& grid = paths.front().grid;
    for (const PathSample& p : paths)
        if (!(p.grid == grid)) throw std::invalid_argument("average_universes: mismatched grids");

    const auto points = static_cast<std::size_t>(grid.points());
    std::vector<NeumaierSum> acc(points);
    for (const PathSample& p : paths)
        for (std::size_t k = 0; k < points; ++k) acc[k].add(p.values[k]);

    std::vector<double> mean(points);
    for (std::size_t k = 0; k < points; ++k)
        mean[k] = acc[k].value() / static_cast<double>(paths.size());
    return mean;
}

namespace {

// Shared ensemble driver. Paths are generated block by block (fixed block
// width, dynamic assignment); trajectory partial sums live in per-block slots
// and are merged in block order afterwards, so the result is independent of
// the worker count.
template <typename MakePath>
EnsembleResult run_ensemble(const TimeGrid& grid, MasterSeed seed, std::int64_t n_paths,
                            const EnsembleOptions& options, MakePath&& make_path) {
    if (n_paths < 1) throw std::invalid_argument("ensemble: need at least one path");
    EnsembleResult result;
    result.paths = n_paths;
    result.horizon = grid.horizon;
    result.seed = seed;
    result.terminal_ratios.assign(static_cast<std::size_t>(n_paths), 0.0);

    const auto points = static_cast<std::size_t>(grid.points());
    const std::int64_t n_blocks = (n_paths + kReductionBlock - 1) / kReductionBlock;
    std::vector<std::vector<NeumaierSum>> block_sums;
    if (options.average_trajectory)
        block_sums.assign(static_cast<std::size_t>(n_blocks), std::vector<NeumaierSum>(points));
    std::vector<std::int64_t> block_bankrupt(static_cast<std::size_t>(n_blocks), 0);

    for_each_block(n_paths, kReductionBlock, options.threads,
                   [&](std::int64_t block, std::int64_t begin, std::int64_t end) {
                       std::vector<double> values;
                       for (std::int64_t i = begin; i < end; ++i) {
                           PathStream stream = substream(seed, static_cast<std::uint64_t>(i));
                           const bool bankrupt = make_path(stream, values);
                           result.terminal_ratios[static_cast<std::size_t>(i)] = values.back();
                           if (bankrupt) ++block_bankrupt[static_cast<std::size_t>(block)];
                           if (options.average_trajectory) {
                               auto& acc = block_sums[static_cast<std::size_t>(block)];
                               for (std::size_t k = 0; k < points; ++k) acc[k].add(values[k]);
                           }
                       }
                   });

    for (std::int64_t b = 0; b < n_blocks; ++b)
        result.bankrupt_paths += block_bankrupt[static_cast<std::size_t>(b)];

    if (options.average_trajectory) {
        result.mean_trajectory.assign(points, 0.0);
        for (std::size_t k = 0; k < points; ++k) {
            NeumaierSum total;
            for (std::int64_t b = 0; b < n_blocks; ++b)
                total.merge(block_sums[static_cast<std::size_t>(b)][k]);
            result.mean_trajectory[k] = total.value() / static_cast<double>(n_paths);
        }
    }
    return result;
}

}  // namespace

EnsembleResult sample_ensemble(const GbmParams& params, const TimeGrid& grid, MasterSeed seed,
                               std::int64_t n_paths, const EnsembleOptions& options) {
    params.validate();
    grid.validate();
    const StepKernel kernel(params, grid.dt());
    return run_ensemble(grid, seed, n_paths, options,
                        [&](PathStream& stream, std::vector<double>& values) {
                            fill_exact_path(kernel, grid.steps,
                                            [&] { return stream.next_normal(); }, values);
                            return false;
                        });
}

EnsembleResult simulate_rebalanced_ensemble(const MarketModel& market, Leverage l,
                                            const TimeGrid& grid, MasterSeed seed,
                                            std::int64_t n_paths, const EnsembleOptions& options) {
    market.validate();
    l.validate();
    grid.validate();
    const RebalanceKernel kernel(market, l, grid.dt());
    return run_ensemble(grid, seed, n_paths, options,
                        [&](PathStream& stream, std::vector<double>& values) {
                            return fill_rebalanced_path(kernel, grid.steps,
                                                        [&] { return stream.next_normal(); },
                                                        values);
                        });
}

}  // namespace gbmlab
