#include "rwd/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "rwd/common.hpp"
#include "rwd/density_ops.hpp"
#include "rwd/stats.hpp"

namespace rwd {

namespace {

constexpr double kPdfFloor = 1e-300;
constexpr double kPitClamp = 1e-10;

}  // namespace

LogScoreResult log_score(std::span<const ForecastRecord> ensemble) {
    LogScoreResult out;
    for (const ForecastRecord& rec : ensemble) {
        if (!(rec.realization > 0.0)) {
            throw DataError("log_score: non-positive realization on " +
                            rec.obs_date.to_string());
        }
        const double price_density =
            pdf_at(rec.density, rec.realization) / rec.density.forward;
        if (price_density < kPdfFloor) {
            out.total += std::log(kPdfFloor);
            ++out.floored;
        } else {
            out.total += std::log(price_density);
        }
    }
    return out;
}

double crps_single(const DensityGrid& density, double realization) {
    const auto& xs = density.returns;
    const auto& cdf = density.cdf;
    const std::size_t n = xs.size();
    if (n < 2 || cdf.size() != n) throw DataError("crps_single: malformed grid");

    auto sq = [](double v) { return v * v; };
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = xs[i];
        const double b = xs[i + 1];
        double fa = cdf[i];
        double fb = cdf[i + 1];
        if (realization <= a) {
            fa -= 1.0;
            fb -= 1.0;
            sum += 0.5 * (sq(fa) + sq(fb)) * (b - a);
        } else if (realization >= b) {
            sum += 0.5 * (sq(fa) + sq(fb)) * (b - a);
        } else {
            // split the cell at the realization: indicator jumps there
            const double fm = cdf_at(density, realization);
            sum += 0.5 * (sq(fa) + sq(fm)) * (realization - a);
            sum += 0.5 * (sq(fm - 1.0) + sq(fb - 1.0)) * (b - realization);
        }
    }
    // tails outside the grid: CDF is 0 / 1 there, so the integrand is
    // zero unless the realization itself lies outside
    if (realization < xs.front()) sum += xs.front() - realization;
    if (realization > xs.back()) sum += realization - xs.back();
    return sum;
}

double crps_aggregate(std::span<const ForecastRecord> ensemble) {
    if (ensemble.empty()) throw DataError("crps_aggregate: empty ensemble");
    double sum = 0.0;
    for (const ForecastRecord& rec : ensemble) {
        sum += std::sqrt(crps_single(rec.density, rec.realization));
    }
    return sum / static_cast<double>(ensemble.size());
}

PitSeries pit_series(std::span<const ForecastRecord> ensemble) {
    PitSeries out;
    out.pits.reserve(ensemble.size());
    out.t_pits.reserve(ensemble.size());
    for (const ForecastRecord& rec : ensemble) {
        const double pit = std::clamp(cdf_at(rec.density, rec.realization),
                                      kPitClamp, 1.0 - kPitClamp);
        out.pits.push_back(pit);
        out.t_pits.push_back(norm_inv(pit));
    }
    return out;
}

double berkowitz_lr3(std::span<const double> t_pits) {
    const std::size_t n = t_pits.size();
    if (n < 20) throw DataError("berkowitz_lr3: need at least 20 observations");

    // Conditional Gaussian AR(1) MLE is OLS of z_t on (1, z_{t-1}).
    const std::size_t m = n - 1;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        sx += t_pits[t - 1];
        sy += t_pits[t];
        sxx += t_pits[t - 1] * t_pits[t - 1];
        sxy += t_pits[t - 1] * t_pits[t];
    }
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    double rho = 0.0, intercept = sy / static_cast<double>(m);
    if (std::fabs(denom) > 1e-12) {
        rho = (static_cast<double>(m) * sxy - sx * sy) / denom;
        intercept = (sy - rho * sx) / static_cast<double>(m);
    }
    double ssr = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        const double resid = t_pits[t] - intercept - rho * t_pits[t - 1];
        ssr += resid * resid;
    }
    const double sigma2 = ssr / static_cast<double>(m);
    if (sigma2 < 1e-12) return 0.0;

    auto cond_loglik = [&](double mu, double s2, double r) {
        double ll = 0.0;
        for (std::size_t t = 1; t < n; ++t) {
            const double e = t_pits[t] - mu - r * (t_pits[t - 1] - mu);
            ll += -0.5 * std::log(2.0 * M_PI * s2) - 0.5 * e * e / s2;
        }
        return ll;
    };
    const double mu_hat = intercept / (1.0 - std::clamp(rho, -0.999, 0.999));
    const double lr3 =
        -2.0 * (cond_loglik(0.0, 1.0, 0.0) - cond_loglik(mu_hat, sigma2, rho));
    return chi2_sf(std::max(lr3, 0.0), 3);
}

double jarque_bera(std::span<const double> t_pits) {
    const std::size_t n = t_pits.size();
    if (n < 20) throw DataError("jarque_bera: need at least 20 observations");
    const SampleMoments m = sample_moments(t_pits);
    const double jb = static_cast<double>(n) *
                      (m.skewness * m.skewness / 6.0 +
                       (m.kurtosis - 3.0) * (m.kurtosis - 3.0) / 24.0);
    return chi2_sf(jb, 2);
}

double ks_normal(std::span<const double> t_pits) {
    const std::size_t n = t_pits.size();
    if (n < 20) throw DataError("ks_normal: need at least 20 observations");
    std::vector<double> sorted(t_pits.begin(), t_pits.end());
    std::sort(sorted.begin(), sorted.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = norm_cdf(sorted[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / static_cast<double>(n) - f);
        d = std::max(d, f - static_cast<double>(i) / static_cast<double>(n));
    }
    return kolmogorov_pvalue(d, static_cast<int>(n));
}

ScoreSummary summarize(const std::string& model_id,
                       std::span<const ForecastRecord> ensemble) {
    ScoreSummary s;
    s.model_id = model_id;
    const LogScoreResult ls = log_score(ensemble);
    s.total_log_score = ls.total;
    s.floored = ls.floored;
    s.crps_mean = crps_aggregate(ensemble);
    PitSeries pits = pit_series(ensemble);
    s.pits = std::move(pits.pits);
    s.t_pits = std::move(pits.t_pits);
    s.p_lr3 = berkowitz_lr3(s.t_pits);
    s.p_jb = jarque_bera(s.t_pits);
    s.p_ks = ks_normal(s.t_pits);
    return s;
}

namespace {

// Map metric totals to [0,1] by a standard-normal CDF of cross-model
// z-scores; degenerate dispersion puts every model at 0.5.
std::vector<double> normal_map(const std::vector<double>& totals, bool lower_better) {
    const std::size_t n = totals.size();
    const SampleMoments m = sample_moments(totals);
    const double sd = std::sqrt(std::max(m.variance, 0.0));
    std::vector<double> out(n, 0.5);
    if (sd < 1e-15) return out;
    for (std::size_t i = 0; i < n; ++i) {
        double z = (totals[i] - m.mean) / sd;
        if (lower_better) z = -z;
        out[i] = norm_cdf(z);
    }
    return out;
}

// Linear rank of p-values: best (highest) -> 1, worst -> 0.
std::vector<double> p_rank(const std::vector<double>& ps) {
    const auto [lo_it, hi_it] = std::minmax_element(ps.begin(), ps.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> out(ps.size(), 0.5);
    if (hi - lo < 1e-300) return out;
    for (std::size_t i = 0; i < ps.size(); ++i) out[i] = (ps[i] - lo) / (hi - lo);
    return out;
}

}  // namespace

void ifs(std::vector<ScoreSummary>& summaries,
         std::span<const std::vector<double>> per_date_log_scores,
         std::span<const std::vector<double>> per_date_crps,
         IfsNormalization normalization) {
    const std::size_t n = summaries.size();
    if (n < 2) throw DataError("ifs: need at least 2 models");

    std::vector<double> l_totals(n), crps_totals(n);
    for (std::size_t i = 0; i < n; ++i) {
        l_totals[i] = summaries[i].total_log_score;
        crps_totals[i] = summaries[i].crps_mean;
    }

    std::vector<double> l_bar, crps_bar;
    if (normalization == IfsNormalization::CrossModel) {
        l_bar = normal_map(l_totals, false);
        crps_bar = normal_map(crps_totals, true);
    } else {
        if (per_date_log_scores.size() != n || per_date_crps.size() != n) {
            throw DataError("ifs: within-model normalization needs per-date scores");
        }
        // Each model's mean score standardized by its own standard
        // error, centered at the cross-model average.
        auto within = [&](std::span<const std::vector<double>> per_date,
                          const std::vector<double>& means, bool lower_better) {
            const double center = sample_moments(means).mean;
            std::vector<double> out(n, 0.5);
            for (std::size_t i = 0; i < n; ++i) {
                const SampleMoments m = sample_moments(per_date[i]);
                const double se = std::sqrt(
                    std::max(m.variance, 0.0) / static_cast<double>(per_date[i].size()));
                if (se < 1e-15) continue;
                double z = (m.mean - center) / se;
                if (lower_better) z = -z;
                out[i] = norm_cdf(z);
            }
            return out;
        };
        std::vector<double> l_means(n), crps_means(n);
        for (std::size_t i = 0; i < n; ++i) {
            l_means[i] = sample_moments(per_date_log_scores[i]).mean;
            crps_means[i] = sample_moments(per_date_crps[i]).mean;
        }
        l_bar = within(per_date_log_scores, l_means, false);
        crps_bar = within(per_date_crps, crps_means, true);
    }

    std::vector<double> lr3(n), jb(n), ks(n);
    for (std::size_t i = 0; i < n; ++i) {
        lr3[i] = summaries[i].p_lr3;
        jb[i] = summaries[i].p_jb;
        ks[i] = summaries[i].p_ks;
    }
    const std::vector<double> r_lr3 = p_rank(lr3), r_jb = p_rank(jb), r_ks = p_rank(ks);

    for (std::size_t i = 0; i < n; ++i) {
        ScoreSummary& s = summaries[i];
        s.l_bar = l_bar[i];
        s.crps_bar = crps_bar[i];
        const int passes = (s.p_lr3 >= 0.05 ? 1 : 0) + (s.p_jb >= 0.05 ? 1 : 0) +
                           (s.p_ks >= 0.05 ? 1 : 0);
        s.stat_bar = 0.25 * passes + 0.25 * (r_lr3[i] + r_jb[i] + r_ks[i]) / 3.0;
        s.ifs = (s.l_bar + s.crps_bar + s.stat_bar) / 3.0;
    }
}

DensityGrid recalibrate(const DensityGrid& risk_adjusted,
                        std::span<const double> past_t_pits,
                        std::size_t min_history, bool* warned) {
    if (past_t_pits.size() < min_history) {
        if (warned != nullptr) *warned = true;
        return risk_adjusted;
    }
    if (warned != nullptr) *warned = false;
    const GaussianKde kde = GaussianKde::with_silverman(
        std::vector<double>(past_t_pits.begin(), past_t_pits.end()));

    DensityGrid out = risk_adjusted;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double u = std::clamp(risk_adjusted.cdf[i], kPitClamp, 1.0 - kPitClamp);
        const double z = norm_inv(u);
        const double ratio = kde.pdf(z) / norm_pdf(z);
        out.pdf[i] = risk_adjusted.pdf[i] * ratio;
    }
    return normalize(out);
}

}  // namespace rwd
