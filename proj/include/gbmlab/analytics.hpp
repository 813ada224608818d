/**
 * @file analytics.hpp
 * @brief Closed-form growth-rate analytics for geometric Brownian motion.
 *
 * Everything here is a pure function of small value types: ensemble- and
 * time-average growth rates, leveraged portfolio dynamics along the efficient
 * frontier, optimal and critical leverage, minimum investment horizons,
 * Sharpe ratios, terminal price-ratio statistics and geometric-mean growth of
 * discrete return distributions. No state, no randomness; safe for
 * unrestricted concurrent use.
 */

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gbmlab {

// ===========================================================================
// Domain types
// ===========================================================================

/// Drift and volatility of a single geometric Brownian motion,
/// dp = p (mu dt + sigma dW). Units: mu in 1/time, sigma in 1/sqrt(time).
struct GbmParams {
    double mu = 0.0;
    double sigma = 0.0;

    void validate() const {
        if (!std::isfinite(mu) || !std::isfinite(sigma))
            throw std::invalid_argument("GbmParams: mu and sigma must be finite");
        if (sigma < 0.0)
            throw std::invalid_argument("GbmParams: sigma must be >= 0");
    }
};

/// Riskless rate, excess market drift and market volatility. Mixing the
/// riskless asset with the market portfolio traces out the efficient
/// frontier; the riskless asset itself is leverage 0, so sigma_m stays > 0.
struct MarketModel {
    double mu_riskless = 0.0;
    double mu_excess = 0.0;
    double sigma_m = 0.0;

    void validate() const {
        if (!std::isfinite(mu_riskless) || !std::isfinite(mu_excess) || !std::isfinite(sigma_m))
            throw std::invalid_argument("MarketModel: all parameters must be finite");
        if (sigma_m <= 0.0)
            throw std::invalid_argument("MarketModel: sigma_m must be > 0");
    }
};

/// Fraction of wealth held in the market portfolio; the rest sits in the
/// riskless asset. May be negative (short) or above one (borrowing).
struct Leverage {
    double value = 0.0;

    void validate() const {
        if (!std::isfinite(value))
            throw std::invalid_argument("Leverage: value must be finite");
    }
};

/// Discrete per-round return distribution: with probability `probability`
/// wealth is multiplied by `factor`, one round lasting `period` time units.
struct DiscreteReturnDistribution {
    struct Outcome {
        double probability = 0.0;
        double factor = 0.0;
    };

    std::vector<Outcome> outcomes;
    double period = 1.0;

    void validate() const {
        if (!(period > 0.0) || !std::isfinite(period))
            throw std::invalid_argument("DiscreteReturnDistribution: period must be > 0");
        if (outcomes.empty())
            throw std::invalid_argument("DiscreteReturnDistribution: no outcomes");
        double total = 0.0;
        for (const Outcome& o : outcomes) {
            if (!std::isfinite(o.probability) || o.probability < 0.0)
                throw std::invalid_argument("DiscreteReturnDistribution: probabilities must be >= 0");
            if (!std::isfinite(o.factor) || o.factor < 0.0)
                throw std::invalid_argument("DiscreteReturnDistribution: return factors must be >= 0");
            total += o.probability;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("DiscreteReturnDistribution: probabilities must sum to 1");
    }
};

/// Two leverages at which the time-average growth rate crosses zero.
/// Growth is positive strictly between them and negative outside.
struct CriticalLeverages {
    double lower = 0.0;
    double upper = 0.0;
};

// ===========================================================================
// Growth rates
// ===========================================================================

/// Growth rate of the ensemble mean: the expected rate of return, mu.
inline double ensemble_growth_rate(const GbmParams& params) {
    params.validate();
    return params.mu;
}

/// Almost-sure long-run exponential growth of a single realization,
/// mu - sigma^2/2. At most equal to the ensemble rate; equal iff sigma = 0.
inline double time_average_growth_rate(const GbmParams& params) {
    params.validate();
    return params.mu - 0.5 * params.sigma * params.sigma;
}

/// GBM parameters of the constant-leverage portfolio: drift
/// mu_riskless + l * mu_excess and volatility |l| * sigma_m. The absolute
/// value keeps short positions valid; the sign lives in the drift alone.
inline GbmParams levered_params(const MarketModel& market, Leverage l) {
    market.validate();
    l.validate();
    return GbmParams{market.mu_riskless + l.value * market.mu_excess,
                     std::abs(l.value) * market.sigma_m};
}

/// Time-average growth rate of the leveraged portfolio,
/// mu_riskless + l mu_excess - l^2 sigma_m^2 / 2. Quadratic in l: the gain
/// is linear but the volatility drag grows with the square of the leverage.
inline double levered_time_growth(const MarketModel& market, Leverage l) {
    market.validate();
    l.validate();
    return market.mu_riskless + l.value * market.mu_excess -
           0.5 * l.value * l.value * market.sigma_m * market.sigma_m;
}

// ===========================================================================
// Optimal and critical leverage, horizons
// ===========================================================================

/// Unique maximizer of levered_time_growth: mu_excess / sigma_m^2.
inline double optimal_leverage(const MarketModel& market) {
    market.validate();
    return market.mu_excess / (market.sigma_m * market.sigma_m);
}

/// Roots of levered_time_growth(l) = 0, or nullopt when the discriminant is
/// negative (growth negative for every leverage).
inline std::optional<CriticalLeverages> critical_leverages(const MarketModel& market) {
    market.validate();
    const double l_opt = optimal_leverage(market);
    const double disc =
        l_opt * l_opt + 2.0 * market.mu_riskless / (market.sigma_m * market.sigma_m);
    if (disc < 0.0) return std::nullopt;
    const double half_width = std::sqrt(disc);
    return CriticalLeverages{l_opt - half_width, l_opt + half_width};
}

/// Minimum investment horizon sigma^2 / (mu - sigma^2/2)^2: the time after
/// which the deterministic trend of a single realization dominates its
/// fluctuations. +infinity when the time-average growth rate is zero, in
/// which case the investment remains a gamble forever.
inline double min_horizon(const GbmParams& params) {
    const double g = time_average_growth_rate(params);
    if (g == 0.0) return std::numeric_limits<double>::infinity();
    return params.sigma * params.sigma / (g * g);
}

/// Minimum investment horizon of the leveraged portfolio,
/// l^2 sigma_m^2 / (levered growth)^2. The denominator is evaluated in
/// root-factored form when real critical leverages exist, so the horizon is
/// +infinity exactly at the values critical_leverages returns.
inline double levered_horizon(const MarketModel& market, Leverage l) {
    market.validate();
    l.validate();
    const double sigma2 = market.sigma_m * market.sigma_m;
    double g;
    if (const auto roots = critical_leverages(market)) {
        g = 0.5 * sigma2 * (l.value - roots->lower) * (roots->upper - l.value);
    } else {
        g = levered_time_growth(market, l);
    }
    if (g == 0.0) return std::numeric_limits<double>::infinity();
    const double num = l.value * l.value * sigma2;
    return num / (g * g);
}

// ===========================================================================
// Sharpe ratio and time units
// ===========================================================================

/// Sharpe ratio mu_excess / sigma_m of any leveraged frontier portfolio.
/// The leverage cancels out exactly, which is why the ratio cannot see
/// over-leveraging; it is undefined at l = 0.
inline double sharpe_ratio(const MarketModel& market, Leverage l) {
    market.validate();
    l.validate();
    if (l.value == 0.0)
        throw std::invalid_argument("sharpe_ratio: undefined at leverage 0");
    return market.mu_excess / market.sigma_m;
}

/// Re-expresses the model in a new time unit, factor = new unit / old unit.
/// Rates scale by factor, volatilities by sqrt(factor). Optimal leverage is
/// dimensionless and invariant; the Sharpe ratio picks up sqrt(factor).
inline MarketModel rescale_time_unit(const MarketModel& market, double factor) {
    market.validate();
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw std::invalid_argument("rescale_time_unit: factor must be > 0");
    const double root = std::sqrt(factor);
    return MarketModel{market.mu_riskless * factor, market.mu_excess * factor,
                       market.sigma_m * root};
}

// ===========================================================================
// Terminal price-ratio distribution
// ===========================================================================

/// Distribution of p(T)/p(0): lognormal with log-mean (mu - sigma^2/2) T and
/// log-sd sigma sqrt(T), degenerating to a point mass when sigma sqrt(T) = 0.
/// The mean exp(mu T) and median exp((mu - sigma^2/2) T) split apart as soon
/// as there is any volatility; their ratio is exp(sigma^2 T / 2).
struct PriceRatioStats {
    double mean = 1.0;
    double median = 1.0;
    double log_mean = 0.0;  ///< mean of ln(p(T)/p(0))
    double log_sd = 0.0;    ///< standard deviation of ln(p(T)/p(0))
    bool point_mass = false;

    /// Lognormal density at x; only defined when not a point mass.
    double density(double x) const {
        if (point_mass)
            throw std::logic_error("PriceRatioStats: degenerate distribution has no density");
        if (x <= 0.0) return 0.0;
        const double z = (std::log(x) - log_mean) / log_sd;
        const double norm = 1.0 / (x * log_sd * std::sqrt(2.0 * M_PI));
        return norm * std::exp(-0.5 * z * z);
    }
};

inline PriceRatioStats price_ratio_stats(const GbmParams& params, double horizon) {
    params.validate();
    if (!(horizon >= 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("price_ratio_stats: horizon must be >= 0");
    PriceRatioStats stats;
    stats.log_mean = (params.mu - 0.5 * params.sigma * params.sigma) * horizon;
    stats.log_sd = params.sigma * std::sqrt(horizon);
    stats.mean = std::exp(params.mu * horizon);
    stats.median = std::exp(stats.log_mean);
    stats.point_mass = (stats.log_sd == 0.0);
    return stats;
}

// ===========================================================================
// Discrete return distributions and bet sizing
// ===========================================================================

/// Time-average growth of a self-financed sequence of multiplicative bets:
/// the expected log return factor per unit time, sum_i p_i ln(r_i) / period.
/// -infinity when ruin (a zero factor) has positive probability.
inline double geometric_mean_growth(const DiscreteReturnDistribution& dist) {
    dist.validate();
    double acc = 0.0;
    for (const auto& o : dist.outcomes) {
        if (o.probability == 0.0) continue;  // 0 * log(0) reads as 0 here
        acc += o.probability * std::log(o.factor);
    }
    return acc / dist.period;
}

struct KellyFraction {
    double fraction = 0.0;  ///< stake maximizing the growth rate
    double growth = 0.0;    ///< growth rate at that stake
};

/// Growth-optimal stake for a double-or-nothing bet won with probability p:
/// wealth is multiplied by 1+f on a win and 1-f on a loss. Located by
/// golden-section search on the concave growth curve over f in (-1, 1);
/// the exact maximizer is 2p - 1.
inline KellyFraction kelly_optimal_fraction(double win_probability, double tolerance = 1e-8) {
    if (!(win_probability >= 0.0 && win_probability <= 1.0))
        throw std::invalid_argument("kelly_optimal_fraction: p must be in [0, 1]");
    const auto growth_at = [win_probability](double f) {
        return win_probability * std::log1p(f) + (1.0 - win_probability) * std::log1p(-f);
    };
    constexpr double kEdge = 1e-12;
    double a = -1.0 + kEdge;
    double b = 1.0 - kEdge;
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = growth_at(x1);
    double f2 = growth_at(x2);
    while (b - a > tolerance) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = growth_at(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = growth_at(x1);
        }
    }
    KellyFraction result;
    result.fraction = 0.5 * (a + b);
    result.growth = growth_at(result.fraction);
    return result;
}

}  // namespace gbmlab
