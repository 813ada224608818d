/**
 * @file experiments.hpp
 * @brief Headline experiments as structured data: the growth-rate surface
 *        with the efficient frontier, the many-universes averaging
 *        demonstration, the single-path relative-error envelope, and a
 *        per-market leverage report.
 *
 * Experiments only orchestrate; every number is recomputed from the
 * analytics and simulation modules, and all stochastic outputs are
 * deterministic for a fixed seed.
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gbmlab/analytics.hpp"
#include "gbmlab/simulate.hpp"

namespace gbmlab {

/// Inclusive sample range for one axis.
struct AxisRange {
    double lo = 0.0;
    double hi = 1.0;
    int count = 2;

    void validate() const {
        if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument("AxisRange: need finite lo <= hi");
        if (count < 2) throw std::invalid_argument("AxisRange: need at least 2 samples");
    }

    std::vector<double> samples() const;
};

// ===========================================================================
// Growth-rate surface with efficient frontier
// ===========================================================================

struct SurfaceGrid {
    struct Point {
        double sigma = 0.0;
        double mu = 0.0;
    };
    struct Marker {
        std::string name;
        double sigma = 0.0;
        double mu = 0.0;
    };

    MarketModel market;
    std::vector<double> sigma_axis;
    std::vector<double> mu_axis;
    std::vector<double> growth;       ///< growth[i_mu * sigma_axis.size() + i_sigma]
    std::vector<Point> frontier;      ///< mu = riskless + sigma * excess / sigma_m
    std::vector<Point> zero_growth;   ///< mu = sigma^2 / 2
    std::vector<Marker> markers;      ///< "R", "M", "l_opt"

    double at(std::size_t i_sigma, std::size_t i_mu) const {
        return growth[i_mu * sigma_axis.size() + i_sigma];
    }
};

/// Time-average growth rate mu - sigma^2/2 over a (sigma, mu) grid, with the
/// efficient frontier line, the zero-growth contour and markers for the
/// riskless asset, the market portfolio and the optimal-leverage portfolio.
SurfaceGrid run_frontier_surface(const MarketModel& market, const AxisRange& sigma_range,
                                 const AxisRange& mu_range);

// ===========================================================================
// Many-universes averaging
// ===========================================================================

struct UniversesRun {
    GbmParams params;
    MasterSeed seed;
    TimeGrid grid;
    std::vector<double> times;
    std::vector<double> exemplar;                ///< path index 0
    std::vector<std::int64_t> ladder;            ///< strictly increasing path counts
    std::vector<std::vector<double>> averages;   ///< one equal-time average per ladder entry
    double min_horizon_marker = 0.0;             ///< noise regime ends about here
};

/// Single exemplar wealth path next to equal-time averages over a growing
/// number of independent universes. Ladder entry N averages paths 0..N-1 of
/// one shared pool, so larger entries reuse and extend smaller ones.
UniversesRun run_universes(const GbmParams& params, double horizon, std::int64_t steps,
                           std::span<const std::int64_t> ladder, MasterSeed seed,
                           int threads = 0);

// ===========================================================================
// Relative-error envelope of the single-path estimator
// ===========================================================================

struct ErrorEnvelopeOptions {
    bool absolute_errors = false;  ///< required when the growth rate is 0
    int threads = 0;
    std::int64_t inset_points = 200;  ///< 0 disables the long-horizon series
};

struct ErrorEnvelopeRun {
    struct PerHorizon {
        double horizon = 0.0;
        std::vector<double> errors;  ///< (g_est - g)/g per sample (or g_est - g)
        double envelope_one = 0.0;   ///< sigma T^{-1/2} / |g| (or sigma T^{-1/2})
        double envelope_two = 0.0;
        double coverage_one = 0.0;   ///< fraction of |error| <= envelope_one
        double coverage_two = 0.0;
    };

    GbmParams params;
    MasterSeed seed;
    bool absolute = false;
    std::vector<PerHorizon> horizons;
    std::vector<double> inset_times;      ///< one long path's estimate vs time
    std::vector<double> inset_estimates;
};

/// Errors of the single-realization estimate (1/T) ln p(T)/p(0) relative to
/// the time-average growth rate, sampled per horizon, with the one- and
/// two-standard-deviation envelopes sigma T^{-1/2} / |g| and their empirical
/// coverage. Sample j of horizon index t draws from path index
/// t * samples + j; the inset path uses the next free index.
ErrorEnvelopeRun run_error_envelope(const GbmParams& params, std::span<const double> horizons,
                                    std::int64_t samples_per_horizon, MasterSeed seed,
                                    const ErrorEnvelopeOptions& options = {});

// ===========================================================================
// Leverage report
// ===========================================================================

struct LeverageReport {
    struct CurvePoint {
        double leverage = 0.0;
        double growth = 0.0;
        double horizon = 0.0;
    };

    MarketModel market;
    double l_opt = 0.0;
    double growth_at_opt = 0.0;
    std::optional<CriticalLeverages> critical;
    double sharpe = 0.0;
    double horizon_l1 = 0.0;       ///< minimum horizon of the market portfolio
    double horizon_at_opt = 0.0;   ///< minimum horizon at optimal leverage
    std::vector<CurvePoint> horizon_curve;
};

/// Everything the analytics module says about one market, plus the growth
/// and horizon curves over a leverage range. The critical leverages are
/// inserted into the curve, where the horizon is +infinity exactly.
LeverageReport leverage_report(const MarketModel& market,
                               const AxisRange& l_range = {-2.0, 5.0, 141});

}  // namespace gbmlab
