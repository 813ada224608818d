/**
 * @file simulate.hpp
 * @brief Monte Carlo engine: exact GBM paths, discretely rebalanced leveraged
 *        wealth, the finite-(T, N) growth estimator and equal-time averaging.
 *
 * Path sampling steps with the exact lognormal transition
 *   p(t+dt) = p(t) exp((mu - sigma^2/2) dt + sigma sqrt(dt) Z),
 * so the marginal law at every grid time is exact and any remaining error in
 * an experiment is statistical, not discretization. The rebalanced simulator
 * compounds each sleeve exactly over a step and rebalances at grid points,
 * which makes leverages 0 and 1 exact and isolates rebalancing frequency as
 * the only source of bias.
 *
 * Path i always draws from substream(seed, i); ensemble reductions run in
 * fixed path order with compensated summation, so results are bit-identical
 * for any worker count.
 */

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gbmlab/analytics.hpp"
#include "gbmlab/random.hpp"

namespace gbmlab {

/// Uniform grid of `steps` intervals covering (0, horizon].
struct TimeGrid {
    double horizon = 1.0;
    std::int64_t steps = 1;

    TimeGrid(double horizon_, std::int64_t steps_) : horizon(horizon_), steps(steps_) {
        validate();
    }

    void validate() const {
        if (!(horizon > 0.0) || !std::isfinite(horizon))
            throw std::invalid_argument("TimeGrid: horizon must be > 0");
        if (steps < 1) throw std::invalid_argument("TimeGrid: steps must be >= 1");
    }

    double dt() const { return horizon / static_cast<double>(steps); }
    double time(std::int64_t k) const { return static_cast<double>(k) * dt(); }
    std::int64_t points() const { return steps + 1; }

    bool operator==(const TimeGrid&) const = default;
};

/// One realization on a grid, normalized to start at 1. If the wealth ever
/// becomes nonpositive the path is absorbed at 0 from that step onward and
/// flagged bankrupt.
struct PathSample {
    TimeGrid grid;
    std::vector<double> values;
    std::uint64_t path_index = 0;
    bool bankrupt = false;

    double terminal() const { return values.back(); }
};

/// Terminal ratios p_i(T)/p_i(0) of an ensemble, with the optional equal-time
/// averaged trajectory and the seed that generated everything.
struct EnsembleResult {
    std::int64_t paths = 0;
    double horizon = 0.0;
    std::vector<double> terminal_ratios;
    std::vector<double> mean_trajectory;  ///< empty unless requested
    std::int64_t bankrupt_paths = 0;
    MasterSeed seed;
};

/// Value of the growth estimator (1/T) ln <p(T)/p(0)>_N with its inputs and
/// a delta-method standard error where one can be estimated (N >= 2).
struct GrowthEstimate {
    double value = 0.0;
    double horizon = 0.0;
    std::int64_t paths = 0;
    double std_error = 0.0;  ///< NaN when not estimable
};

struct EnsembleOptions {
    bool average_trajectory = false;
    int threads = 0;  ///< 0 = all hardware threads
};

/// Exact lognormal path of a GBM; never bankrupt.
PathSample sample_path_exact(const GbmParams& params, const TimeGrid& grid, PathStream& stream);

/// Exact path driven by externally supplied standard normals (one per step).
PathSample sample_path_exact(const GbmParams& params, const TimeGrid& grid,
                             std::span<const double> normals);

/// Wealth of a constant-leverage portfolio rebalanced at every grid point:
///   w(t+dt) = w(t) [ (1-l) e^{r dt} + l e^{(mu_M - sigma_M^2/2) dt + sigma_M sqrt(dt) Z} ].
/// At l = 1 this reproduces sample_path_exact of the market portfolio bit for
/// bit when driven by the same stream; at l = 0 it compounds the riskless
/// rate deterministically (the stream is still consumed, one draw per step,
/// to keep draw positions aligned across leverages).
PathSample simulate_rebalanced(const MarketModel& market, Leverage l, const TimeGrid& grid,
                               PathStream& stream);

/// Rebalanced wealth path driven by externally supplied standard normals.
PathSample simulate_rebalanced(const MarketModel& market, Leverage l, const TimeGrid& grid,
                               std::span<const double> normals);

/// (1/T) ln of the ensemble-averaged terminal ratio. The average is taken
/// before the logarithm; -infinity when every ratio is 0. Throws if any
/// ratio is negative, if the ensemble is empty, or if T <= 0.
GrowthEstimate growth_estimator(const EnsembleResult& ensemble, double horizon);

/// Pointwise arithmetic mean of paths at equal times (fixed path order,
/// compensated). Throws if the grids differ.
std::vector<double> average_universes(std::span<const PathSample> paths);

/// Ensemble of exact GBM paths, path i on substream(seed, i).
EnsembleResult sample_ensemble(const GbmParams& params, const TimeGrid& grid, MasterSeed seed,
                               std::int64_t n_paths, const EnsembleOptions& options = {});

/// Ensemble of rebalanced constant-leverage wealth paths.
EnsembleResult simulate_rebalanced_ensemble(const MarketModel& market, Leverage l,
                                            const TimeGrid& grid, MasterSeed seed,
                                            std::int64_t n_paths,
                                            const EnsembleOptions& options = {});

}  // namespace gbmlab
