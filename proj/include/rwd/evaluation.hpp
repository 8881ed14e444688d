#pragma once

#include <span>
#include <string>
#include <vector>

#include "rwd/dates.hpp"
#include "rwd/density_grid.hpp"

namespace rwd {

// One out-of-sample forecast together with its realized gross return.
struct ForecastRecord {
    Date obs_date;
    std::string model_id;
    DensityGrid density;
    double realization = 1.0;  // realized gross return over the horizon
};

struct LogScoreResult {
    double total = 0.0;      // nats, price-space convention
    int floored = 0;         // realizations where the pdf underflowed
};

// Sum over dates of log(pdf(realization) / forward): the density is
// scored in price space so totals are comparable across studies.
LogScoreResult log_score(std::span<const ForecastRecord> ensemble);

// Integrated squared distance between the forecast CDF and the
// realization step function, over the return grid.
double crps_single(const DensityGrid& density, double realization);

// Mean over dates of the square root of the crps_single integral.
// Reported x100 as an average percent return deviation.
double crps_aggregate(std::span<const ForecastRecord> ensemble);

struct PitSeries {
    std::vector<double> pits;    // in (0,1) after clamping
    std::vector<double> t_pits;  // standard-normal quantiles of the pits
};

PitSeries pit_series(std::span<const ForecastRecord> ensemble);

// Likelihood-ratio test of zero mean, unit variance, and independence
// of the transformed PITs under a Gaussian AR(1); p from chi2(3).
double berkowitz_lr3(std::span<const double> t_pits);

// Normality of the transformed PITs.
double jarque_bera(std::span<const double> t_pits);
double ks_normal(std::span<const double> t_pits);

struct ScoreSummary {
    std::string model_id;
    double total_log_score = 0.0;
    double crps_mean = 0.0;
    std::vector<double> pits;
    std::vector<double> t_pits;
    double p_lr3 = 0.0;
    double p_jb = 0.0;
    double p_ks = 0.0;
    double l_bar = 0.0;
    double crps_bar = 0.0;
    double stat_bar = 0.0;
    double ifs = 0.0;  // (l_bar + crps_bar + stat_bar) / 3
    int floored = 0;
};

// Accuracy/error totals and the consistency tests for one model.
ScoreSummary summarize(const std::string& model_id,
                       std::span<const ForecastRecord> ensemble);

enum class IfsNormalization { CrossModel, WithinModel };

// Fill l_bar / crps_bar / stat_bar / ifs across the model set.
// Cross-model: each total is z-scored against the other models and
// mapped through the standard normal CDF (lower CRPS is better, so
// its z-score is negated). Within-model: z-scores use each model's
// own per-date score dispersion instead.
void ifs(std::vector<ScoreSummary>& summaries,
         std::span<const std::vector<double>> per_date_log_scores = {},
         std::span<const std::vector<double>> per_date_crps = {},
         IfsNormalization normalization = IfsNormalization::CrossModel);

// Multiply the density by the empirical calibration ratio built from
// past transformed PITs (Gaussian KDE over a standard-normal
// baseline), then renormalize. Fewer than min_history past values
// returns the input unchanged with warned = true.
DensityGrid recalibrate(const DensityGrid& risk_adjusted,
                        std::span<const double> past_t_pits,
                        std::size_t min_history = 24, bool* warned = nullptr);

}  // namespace rwd
