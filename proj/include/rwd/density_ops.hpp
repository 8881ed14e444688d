#pragma once

#include <functional>
#include <span>
#include <variant>

#include "rwd/density_grid.hpp"
#include "rwd/market_data.hpp"

namespace rwd {

struct GridMoments {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;  // non-excess
};

// Trapezoidal integral of ys over xs.
double trapezoid(std::span<const double> xs, std::span<const double> ys);

// Divide the pdf by its integral and recompute the cdf by cumulative
// trapezoid. Throws on a degenerate (zero-mass) density.
DensityGrid normalize(const DensityGrid& grid);

GridMoments moments(const DensityGrid& grid);

// Inverse CDF by linear interpolation; p in (0,1).
double quantile(const DensityGrid& grid, double p);

// Interpolated CDF; clamps to 0/1 outside the grid. This is the PIT
// when x is the realized gross return.
double cdf_at(const DensityGrid& grid, double x);

// Interpolated pdf; 0 outside the grid.
double pdf_at(const DensityGrid& grid, double x);

// Exponential tilt pdf(x) x^gamma, renormalized. gamma = 0 is the
// identity (risk-neutral investors as the CRRA special case).
DensityGrid crra_adjust(const DensityGrid& grid, double gamma);

// pdf / u'(x), renormalized. crra_adjust(g) == utility_adjust(x^-g).
DensityGrid utility_adjust(const DensityGrid& grid,
                           const std::function<double(double)>& marginal_utility);

// Model-free option-implied moments (quadratic/cubic/quartic payoff
// replication over the observed strike range).
struct BkmMoments {
    double vol = 0.0;       // annualized risk-neutral volatility
    double skew = 0.0;
    double kurt = 0.0;      // non-excess
    double v = 0.0;         // quadratic contract value
    double w = 0.0;         // cubic contract value
    double x = 0.0;         // quartic contract value
    double mu = 0.0;        // mean log return over the horizon
    double var_horizon = 0.0;  // horizon-scaled risk-neutral variance
};

BkmMoments bkm_moments(const CrossSection& section);

// Option-implied relative risk aversion from the risk-neutral /
// physical variance spread. Always returns a value in [-1, 6].
struct IrraResult {
    double gamma = 0.0;
    bool clamped = false;
    double residual = 0.0;  // epsilon at the returned gamma
};

IrraResult irra_estimate(const BkmMoments& bkm, double physical_var_horizon);

// Horizon-scaled physical variance from the last >= 31 daily closes
// (sample variance of daily log returns, annualized at 252 days).
double realized_variance(std::span<const double> closes, double tau);

}  // namespace rwd
