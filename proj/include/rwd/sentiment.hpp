#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rwd/dates.hpp"
#include "rwd/density_grid.hpp"

namespace rwd {

enum class ProxyKind { DeltaIv, DeltaTv, Skew };

std::string proxy_kind_name(ProxyKind kind);
ProxyKind parse_proxy_kind(const std::string& name);

// Append-only dated series for one proxy. Quantile queries only ever
// see observations strictly before the query date.
struct ProxyHistory {
    ProxyKind kind = ProxyKind::DeltaIv;
    std::vector<Date> dates;
    std::vector<double> values;

    void append(const Date& date, double value);
    // values dated strictly before `asof`
    std::vector<double> before(const Date& asof) const;
    std::size_t size() const { return values.size(); }
};

// Per-date behavioral correction. Neutral is (0, 1, 0).
struct SentimentState {
    double theta1 = 0.0;    // mean shift, gross-return units
    double theta2 = 1.0;    // volatility multiplier
    double theta3 = 0.0;    // tail-shift intensity
    double alpha_iv = 0.5;  // quantile position of the current vol proxy
    double alpha_tv = 0.5;  // quantile position of the current volume proxy
    double skew = 0.0;
    bool mean_active = false;
    bool vol_active = false;
    bool tail_active = false;

    bool neutral() const { return !mean_active && !vol_active && !tail_active; }
};

struct SentimentCalibration {
    double k1 = 1.0;
    double k2 = 1.2;
    double k3 = 1.0;
    std::string profile = "low";

    static SentimentCalibration low() { return {1.0, 1.2, 1.0, "low"}; }
    static SentimentCalibration high() { return {2.0, 1.5, 2.0, "high"}; }
    static SentimentCalibration from_profile(const std::string& profile);
};

// Current IV minus the mean of the three most recent prior IVs.
// Returns false (proxy inactive) with fewer than 3 priors.
bool delta_iv(double current_iv, std::span<const double> prior_ivs, double* out);

// Current volume over the mean of the three most recent prior
// volumes; optional seasonal divisor for August observations.
bool delta_tv(double current_volume, std::span<const double> prior_volumes,
              bool is_august, bool august_adjust, double august_factor,
              double* out);

// Smoothed empirical quantile of new_obs in the prior history: mean
// of Gaussian kernel CDFs with Silverman bandwidth. Below the burn-in
// count the result is the neutral 0.5.
double kde_quantile(std::span<const double> prior, double new_obs,
                    std::size_t burn_in = 24);

// Piecewise-linear trigger maps from quantile position / skew to the
// correction intensities. Dead zone is [0.05, 0.95] (|skew| <= 1.5).
double theta1(double alpha_iv, double rate, double tau, double k1);
double theta2(double alpha_tv, double k2);
// printed_sign keeps the sign convention under which deep negative
// skew deepens the left tail further; default corrects it instead.
double theta3(double skew, double k3, bool printed_sign = false);

// Affine map x_hat = theta1 + theta2 x + (1 - theta2) mu resampled
// onto the input grid, so mean -> mean + theta1 and sd -> theta2 sd.
// clamp_warning (optional) is set when the transformed support would
// reach non-positive gross returns and mass had to be clamped.
DensityGrid mean_variance_shift(const DensityGrid& grid, double theta1,
                                double theta2, bool* clamp_warning = nullptr);

// Divide the pdf by a piecewise log-linear tail kernel anchored at the
// grid's own alpha_tail / (1 - alpha_tail) quantiles, then normalize.
// theta3 > 0 moves mass from the left tail to the right tail.
DensityGrid tail_shift(const DensityGrid& grid, double theta3,
                       double alpha_tail = 0.05);

// Behavioral correction of a risk-adjusted density: mean-variance
// shift first, then the tail shift.
DensityGrid real_world_density(const DensityGrid& risk_adjusted,
                               const SentimentState& state,
                               double alpha_tail = 0.05);

// Pointwise ratio risk_adjusted / real_world where both pdfs exceed
// 1e-12; NaN elsewhere.
std::vector<double> sentiment_function(const DensityGrid& risk_adjusted,
                                       const DensityGrid& real_world);

// Full stochastic discount factor e^{-r tau} u'(x) Psi(x) on the grid.
std::vector<double> behavioral_sdf(const DensityGrid& risk_adjusted,
                                   const DensityGrid& real_world, double rate,
                                   double tau,
                                   const std::function<double(double)>& marginal_utility);

struct SentimentConfig {
    std::string profile = "low";
    double alpha_tail = 0.05;
    std::size_t burn_in = 24;
    bool august_adjust = false;
    double august_factor = 1.0;
    bool printed_tail_sign = false;
};

// Assemble the per-date state from the current proxy readings and
// their histories (history excludes the current date).
SentimentState sentiment_state(const Date& asof, const ProxyHistory& iv_history,
                               const ProxyHistory& tv_history, double delta_iv_now,
                               double delta_tv_now, double skew_now, double rate,
                               double tau, const SentimentConfig& config);

}  // namespace rwd
