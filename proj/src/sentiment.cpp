#include "rwd/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwd/common.hpp"
#include "rwd/density_ops.hpp"
#include "rwd/stats.hpp"

namespace rwd {

std::string proxy_kind_name(ProxyKind kind) {
    switch (kind) {
        case ProxyKind::DeltaIv: return "delta_iv";
        case ProxyKind::DeltaTv: return "delta_tv";
        case ProxyKind::Skew: return "skew";
    }
    throw DataError("proxy_kind_name: unknown kind");
}

ProxyKind parse_proxy_kind(const std::string& name) {
    if (name == "delta_iv") return ProxyKind::DeltaIv;
    if (name == "delta_tv") return ProxyKind::DeltaTv;
    if (name == "skew") return ProxyKind::Skew;
    throw ParseError("unknown proxy kind: " + name);
}

void ProxyHistory::append(const Date& date, double value) {
    if (!dates.empty() && !(dates.back().serial() < date.serial())) {
        throw DataError("ProxyHistory: dates must be strictly increasing (got " +
                        date.to_string() + " after " + dates.back().to_string() + ")");
    }
    dates.push_back(date);
    values.push_back(value);
}

std::vector<double> ProxyHistory::before(const Date& asof) const {
    std::vector<double> out;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        if (dates[i].serial() < asof.serial()) out.push_back(values[i]);
    }
    return out;
}

SentimentCalibration SentimentCalibration::from_profile(const std::string& profile) {
    if (profile == "low") return low();
    if (profile == "high") return high();
    throw ParseError("unknown sentiment profile: " + profile);
}

bool delta_iv(double current_iv, std::span<const double> prior_ivs, double* out) {
    if (prior_ivs.size() < 3) return false;
    const std::size_t n = prior_ivs.size();
    const double mean =
        (prior_ivs[n - 1] + prior_ivs[n - 2] + prior_ivs[n - 3]) / 3.0;
    *out = current_iv - mean;
    return true;
}

bool delta_tv(double current_volume, std::span<const double> prior_volumes,
              bool is_august, bool august_adjust, double august_factor,
              double* out) {
    if (prior_volumes.size() < 3) return false;
    const std::size_t n = prior_volumes.size();
    const double a = prior_volumes[n - 1];
    const double b = prior_volumes[n - 2];
    const double c = prior_volumes[n - 3];
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0)) return false;
    double ratio = current_volume / ((a + b + c) / 3.0);
    if (is_august && august_adjust) {
        if (!(august_factor > 0.0)) {
            throw DataError("delta_tv: august factor must be positive");
        }
        ratio /= august_factor;
    }
    *out = ratio;
    return true;
}

double kde_quantile(std::span<const double> prior, double new_obs,
                    std::size_t burn_in) {
    if (prior.size() < burn_in) return 0.5;
    GaussianKde kde = GaussianKde::with_silverman(
        std::vector<double>(prior.begin(), prior.end()));
    return std::clamp(kde.cdf(new_obs), 1e-12, 1.0 - 1e-12);
}

double theta1(double alpha_iv, double rate, double tau, double k1) {
    const double edge = (1.0 - std::exp(rate * tau)) * k1;
    if (alpha_iv < 0.05) return edge * (0.05 - alpha_iv) / 0.05;
    if (alpha_iv > 0.95) return -edge * (alpha_iv - 0.95) / 0.05;
    return 0.0;
}

double theta2(double alpha_tv, double k2) {
    if (!(k2 > 0.0)) throw DataError("theta2: k2 must be positive");
    if (alpha_tv < 0.05) {
        return 1.0 + (1.0 / k2 - 1.0) * (0.05 - alpha_tv) / 0.05;
    }
    if (alpha_tv > 0.95) {
        return 1.0 + (k2 - 1.0) * (alpha_tv - 0.95) / 0.05;
    }
    return 1.0;
}

double theta3(double skew, double k3, bool printed_sign) {
    double t = 0.0;
    if (skew < -1.5) {
        t = k3 * (-skew - 1.5);
    } else if (skew > 1.5) {
        t = -k3 * (skew - 1.5);
    }
    return printed_sign ? -t : t;
}

DensityGrid mean_variance_shift(const DensityGrid& grid, double theta1,
                                double theta2, bool* clamp_warning) {
    if (!(theta2 > 0.0)) throw DataError("mean_variance_shift: theta2 must be > 0");
    const double mu = moments(grid).mean;
    const double shift = theta1 + (1.0 - theta2) * mu;

    DensityGrid out = grid;
    for (std::size_t i = 0; i < out.size(); ++i) {
        // value of the shifted density at the standard grid point x:
        // g(x) = f((x - shift) / theta2) / theta2
        const double pre = (out.returns[i] - shift) / theta2;
        out.pdf[i] = pre > 0.0 ? pdf_at(grid, pre) / theta2 : 0.0;
    }
    if (clamp_warning != nullptr) {
        // warn when the shift maps non-negligible mass onto non-positive returns
        *clamp_warning = shift < 0.0 && cdf_at(grid, -shift / theta2) > 1e-12;
    }
    return normalize(out);
}

DensityGrid tail_shift(const DensityGrid& grid, double theta3, double alpha_tail) {
    if (!(alpha_tail > 0.0 && alpha_tail < 0.5)) {
        throw DataError("tail_shift: alpha_tail must be in (0, 0.5)");
    }
    if (theta3 == 0.0) return grid;
    const double q_lo = quantile(grid, alpha_tail);
    const double q_hi = quantile(grid, 1.0 - alpha_tail);

    DensityGrid out = grid;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = out.returns[i];
        // log-linear kernel: > 1 in the left tail, < 1 in the right
        // tail when theta3 > 0, identically 1 in the body
        double log_kernel = 0.0;
        if (x < q_lo) {
            log_kernel = theta3 * (q_lo - x);
        } else if (x > q_hi) {
            log_kernel = -theta3 * (x - q_hi);
        }
        out.pdf[i] = grid.pdf[i] / std::exp(log_kernel);
    }
    return normalize(out);
}

DensityGrid real_world_density(const DensityGrid& risk_adjusted,
                               const SentimentState& state, double alpha_tail) {
    if (state.neutral()) return risk_adjusted;
    DensityGrid shifted =
        mean_variance_shift(risk_adjusted, state.theta1, state.theta2);
    return tail_shift(shifted, state.theta3, alpha_tail);
}

std::vector<double> sentiment_function(const DensityGrid& risk_adjusted,
                                       const DensityGrid& real_world) {
    if (risk_adjusted.size() != real_world.size()) {
        throw DataError("sentiment_function: grids differ in size");
    }
    std::vector<double> psi(risk_adjusted.size(),
                            std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (risk_adjusted.pdf[i] > 1e-12 && real_world.pdf[i] > 1e-12) {
            psi[i] = risk_adjusted.pdf[i] / real_world.pdf[i];
        }
    }
    return psi;
}

std::vector<double> behavioral_sdf(const DensityGrid& risk_adjusted,
                                   const DensityGrid& real_world, double rate,
                                   double tau,
                                   const std::function<double(double)>& marginal_utility) {
    std::vector<double> m = sentiment_function(risk_adjusted, real_world);
    const double df = std::exp(-rate * tau);
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] *= df * marginal_utility(risk_adjusted.returns[i]);
    }
    return m;
}

SentimentState sentiment_state(const Date& asof, const ProxyHistory& iv_history,
                               const ProxyHistory& tv_history, double delta_iv_now,
                               double delta_tv_now, double skew_now, double rate,
                               double tau, const SentimentConfig& config) {
    const SentimentCalibration cal =
        SentimentCalibration::from_profile(config.profile);
    SentimentState state;
    state.skew = skew_now;

    const std::vector<double> iv_prior = iv_history.before(asof);
    state.alpha_iv = kde_quantile(iv_prior, delta_iv_now, config.burn_in);
    state.theta1 = theta1(state.alpha_iv, rate, tau, cal.k1);
    state.mean_active = state.theta1 != 0.0;

    const std::vector<double> tv_prior = tv_history.before(asof);
    state.alpha_tv = kde_quantile(tv_prior, delta_tv_now, config.burn_in);
    state.theta2 = theta2(state.alpha_tv, cal.k2);
    state.vol_active = state.theta2 != 1.0;

    state.theta3 = theta3(skew_now, cal.k3, config.printed_tail_sign);
    state.tail_active = state.theta3 != 0.0;
    return state;
}

}  // namespace rwd
