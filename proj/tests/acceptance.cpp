// End-to-end acceptance checks for the density-forecasting library.
// Each numbered check prints exactly one PASS/FAIL line; the process
// exits nonzero when any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rwd/black76.hpp"
#include "rwd/calibration.hpp"
#include "rwd/char_models.hpp"
#include "rwd/density_grid.hpp"
#include "rwd/density_ops.hpp"
#include "rwd/evaluation.hpp"
#include "rwd/market_data.hpp"
#include "rwd/pipeline.hpp"
#include "rwd/sentiment.hpp"
#include "rwd/stats.hpp"

using namespace rwd;
namespace chrono = std::chrono;

namespace {

int g_failures = 0;

void report(int number, const std::string& label, bool ok,
            const std::string& detail) {
    std::printf("%s %2d: %s (%s)\n", ok ? "PASS" : "FAIL", number, label.c_str(),
                detail.c_str());
    if (!ok) ++g_failures;
}

double now_seconds(const chrono::steady_clock::time_point& t0) {
    return chrono::duration<double>(chrono::steady_clock::now() - t0).count();
}

DensityGrid analytic_ln_grid(double s, std::size_t n, double stdevs = 10.0) {
    DensityGrid g;
    g.forward = 1.0;
    g.tau = 28.0 / 360.0;
    g.returns.resize(n);
    g.pdf.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lr = -stdevs * s + 2.0 * stdevs * s * static_cast<double>(i) /
                                           static_cast<double>(n - 1);
        g.returns[i] = std::exp(lr);
        const double z = (lr + 0.5 * s * s) / s;
        g.pdf[i] = norm_pdf(z) / (g.returns[i] * s);
    }
    return normalize(g);
}

// ---- 1: Fourier inversion against the closed-form lognormal --------------

void check_fourier_inversion() {
    const double tau = 28.0 / 360.0, F = 100.0, sigma = 0.2;
    std::vector<double> ks(2048);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        ks[i] = F * std::exp(-0.5 + 1.0 * static_cast<double>(i) / 2047.0);
    }
    const auto t0 = chrono::steady_clock::now();
    const std::vector<double> cdf = cdf_from_cf(LnParams{sigma}, ks, tau, F);
    const double elapsed = now_seconds(t0);

    const double s = sigma * std::sqrt(tau);
    double max_err = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const double want = norm_cdf((std::log(ks[i] / F) + 0.5 * s * s) / s);
        max_err = std::max(max_err, std::fabs(cdf[i] - want));
    }

    const HestonParams h{0.04, 0.05, 1.8, 0.6, -0.55};
    const BatesParams b{h, 0.0, 0.1, 0.2};
    double max_collapse = 0.0;
    const std::vector<double> sample(ks.begin(), ks.begin() + 64);
    const auto ch = cdf_from_cf(h, sample, tau, F);
    const auto cb = cdf_from_cf(b, sample, tau, F);
    const auto ph = price_european_calls(h, sample, tau, F, 0.02);
    const auto pb = price_european_calls(b, sample, tau, F, 0.02);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        max_collapse = std::max(max_collapse, std::fabs(ch[i] - cb[i]));
        max_collapse = std::max(max_collapse, std::fabs(ph[i] - pb[i]));
    }

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "max cdf err %.2e, zero-jump collapse %.2e, %.3fs per section",
                  max_err, max_collapse, elapsed);
    report(1, "Fourier inversion matches the closed-form lognormal",
           max_err < 1e-6 && max_collapse < 1e-10 && elapsed < 1.0, detail);
}

// ---- 2: martingale identity over random admissible parameters ------------

void check_martingale() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int draws = 0;
    while (draws < 1000) {
        ModelParams m;
        switch (draws % 4) {
            case 0: m = LnParams{0.02 + 1.5 * u(rng)}; break;
            case 1:
                m = HestonParams{1e-4 + 0.6 * u(rng), 1e-4 + 0.6 * u(rng),
                                 0.05 + 6.0 * u(rng), 0.05 + 1.8 * u(rng),
                                 -0.95 + 1.9 * u(rng)};
                break;
            case 2:
                m = BatesParams{HestonParams{1e-4 + 0.4 * u(rng), 1e-4 + 0.4 * u(rng),
                                             0.1 + 5.0 * u(rng), 0.05 + 1.5 * u(rng),
                                             -0.9 + 1.8 * u(rng)},
                                4.0 * u(rng), -0.4 + 0.8 * u(rng),
                                0.01 + 0.5 * u(rng)};
                break;
            default:
                m = VgParams{0.05 + 0.6 * u(rng), 0.01 + 1.5 * u(rng),
                             -0.8 + 1.6 * u(rng)};
                break;
        }
        if (!params_admissible(m)) continue;
        ++draws;
        const double tau = 0.02 + u(rng);
        const double F = 10.0 + 190.0 * u(rng);
        const auto psi = characteristic_function(m, {0.0, -1.0}, tau, F);
        worst = std::max(worst, std::abs(psi - std::complex<double>(F, 0.0)) / F);
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "worst relative error %.2e over %d draws",
                  worst, draws);
    report(2, "forward identity psi(-i) = F holds for all models", worst < 1e-6,
           detail);
}

// ---- 3: calibration round trip on a clean synthetic market ---------------

void check_calibration_round_trip() {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "rwd_accept_heston";
    std::filesystem::remove_all(dir);
    SyntheticMarketSpec spec;
    spec.true_model = HestonParams{0.04, 0.05, 1.5, 0.5, -0.6};
    spec.n_dates = 30;
    spec.half_spread = 0.0;
    simulate_market(spec, 42, dir.string());

    const auto sections = parse_option_chain((dir / "chain.csv").string());
    double worst_sre = 0.0, worst_quote = 0.0, worst_seconds = 0.0;
    bool ok = true;
    for (const CrossSection& raw : sections) {
        const CrossSection prep = prepare_cross_section(raw);
        const auto t0 = chrono::steady_clock::now();
        const CalibrationResult res = calibrate(ModelKind::Heston, prep);
        const double elapsed = now_seconds(t0);
        worst_seconds = std::max(worst_seconds, elapsed);
        worst_sre = std::max(worst_sre, res.sre);

        std::vector<double> strikes(prep.quotes.size());
        for (std::size_t i = 0; i < strikes.size(); ++i) {
            strikes[i] = prep.quotes[i].strike;
        }
        const std::vector<double> repriced = price_european_calls(
            res.params, strikes, prep.tau, prep.forward, prep.rate);
        for (std::size_t i = 0; i < strikes.size(); ++i) {
            worst_quote = std::max(
                worst_quote,
                std::fabs(repriced[i] - prep.call_mids[i]) / prep.call_mids[i]);
        }
        if (res.sre >= 1e-3 || elapsed >= 30.0) ok = false;
    }
    if (worst_quote >= 0.005) ok = false;
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "worst SRE %.2e, worst quote error %.3f%%, slowest date %.1fs",
                  worst_sre, 100.0 * worst_quote, worst_seconds);
    report(3, "stochastic-volatility calibration reprices a clean market", ok,
           detail);
}

// ---- 4: power-utility tilt oracle ----------------------------------------

void check_risk_adjustment() {
    const double s = 0.2 * std::sqrt(28.0 / 360.0);
    const DensityGrid g = analytic_ln_grid(s, 2048);
    const DensityGrid id = crra_adjust(g, 0.0);
    double id_err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        id_err = std::max(id_err, std::fabs(id.pdf[i] - g.pdf[i]));
    }
    const double ratio = moments(crra_adjust(g, 2.0)).mean / moments(g).mean;
    const double ratio_err = std::fabs(ratio - std::exp(2.0 * s * s));
    char detail[96];
    std::snprintf(detail, sizeof(detail), "identity err %.2e, mean-ratio err %.2e",
                  id_err, ratio_err);
    report(4, "risk-adjustment tilt matches the analytic lognormal",
           id_err < 1e-14 && ratio_err < 1e-6, detail);
}

// ---- 5: behavioral transform contracts ------------------------------------

void check_sentiment_contracts() {
    const double s = 0.2 * std::sqrt(28.0 / 360.0);
    const DensityGrid g = analytic_ln_grid(s, 16384);
    const GridMoments base = moments(g);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_mean = 0.0, worst_sd = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double t1 = -0.02 + 0.04 * u(rng);
        const double t2 = 0.8 + 0.5 * u(rng);
        const GridMoments m = moments(mean_variance_shift(g, t1, t2));
        worst_mean = std::max(worst_mean, std::fabs(m.mean - (base.mean + t1)));
        worst_sd = std::max(
            worst_sd, std::fabs(std::sqrt(m.variance) - t2 * std::sqrt(base.variance)));
    }

    const DensityGrid ts_id = tail_shift(g, 0.0);
    double id_err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        id_err = std::max(id_err, std::fabs(ts_id.pdf[i] - g.pdf[i]));
    }

    SentimentState st;
    st.theta1 = 0.01;
    st.theta2 = 1.2;
    st.theta3 = 0.8;
    st.mean_active = st.vol_active = st.tail_active = true;
    const DensityGrid f_mv = mean_variance_shift(g, st.theta1, st.theta2);
    const DensityGrid f_rw = real_world_density(g, st, 0.05);
    const double mass_err =
        std::fabs(trapezoid(f_rw.returns, f_rw.pdf) - 1.0);

    // the total correction factors into its two stages pointwise
    const auto psi_total = sentiment_function(g, f_rw);
    const auto psi_mv = sentiment_function(g, f_mv);
    const auto psi_ts = sentiment_function(f_mv, f_rw);
    double factor_err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::isnan(psi_total[i]) || std::isnan(psi_mv[i]) ||
            std::isnan(psi_ts[i])) {
            continue;
        }
        factor_err = std::max(
            factor_err, std::fabs(psi_total[i] - psi_mv[i] * psi_ts[i]) /
                            std::fabs(psi_total[i]));
    }

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "mean err %.2e, sd err %.2e, identity %.2e, mass %.2e, "
                  "factorization %.2e",
                  worst_mean, worst_sd, id_err, mass_err, factor_err);
    report(5, "behavioral transforms honor their moment and mass contracts",
           worst_mean < 1e-6 && worst_sd < 1e-6 && id_err == 0.0 &&
               mass_err < 1e-8 && factor_err < 1e-6,
           detail);
}

// ---- 6: trigger ranges -----------------------------------------------------

void check_trigger_ranges() {
    bool ok = true;
    for (double k2 : {1.2, 1.5}) {
        double lo = 10.0, hi = -10.0;
        for (double a = 1e-9; a < 1.0; a += 1e-4) {
            const double t = theta2(a, k2);
            lo = std::min(lo, t);
            hi = std::max(hi, t);
            if (t < 1.0 / k2 - 1e-9 || t > k2 + 1e-9) ok = false;
        }
        if (std::fabs(lo - 1.0 / k2) > 1e-3 || std::fabs(hi - k2) > 1e-3) ok = false;
    }
    const double rate = 0.02, tau = 28.0 / 360.0;
    for (double k1 : {1.0, 2.0}) {
        const double bound = k1 * std::fabs(1.0 - std::exp(rate * tau));
        for (double a = 1e-9; a < 1.0; a += 1e-4) {
            if (std::fabs(theta1(a, rate, tau, k1)) > bound + 1e-12) ok = false;
        }
        if (std::fabs(std::fabs(theta1(1e-12, rate, tau, k1)) - bound) > 1e-6) {
            ok = false;
        }
    }
    for (double skew = -3.0; skew <= 3.0; skew += 0.01) {
        const bool zero = theta3(skew, 1.0) == 0.0;
        if (zero != (std::fabs(skew) <= 1.5)) ok = false;
    }
    report(6, "trigger functions stay inside their published ranges", ok,
           "theta2 in [1/k2, k2], |theta1| <= k1|1-e^{r tau}|, theta3 dead zone");
}

// ---- 7: scoring oracles and model discrimination ---------------------------

void check_scoring() {
    const auto t0 = chrono::steady_clock::now();

    // closed-form Gaussian reference
    DensityGrid gauss;
    gauss.forward = 1.0;
    gauss.tau = 28.0 / 360.0;
    const std::size_t n = 4001;
    gauss.returns.resize(n);
    gauss.pdf.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = 1.0 - 0.6 + 1.2 * static_cast<double>(i) /
                                        static_cast<double>(n - 1);
        gauss.returns[i] = x;
        gauss.pdf[i] = norm_pdf((x - 1.0) / 0.06) / 0.06;
    }
    gauss = normalize(gauss);
    const double crps_err =
        std::fabs(crps_single(gauss, 1.05) - 0.029745211940006653);

    // the generating model wins the log score against misspecified rivals
    const double s_true = 0.2 * std::sqrt(28.0 / 360.0);
    const DensityGrid truth = analytic_ln_grid(s_true, 2048);
    const DensityGrid wide = analytic_ln_grid(1.3 * s_true, 2048);
    const DensityGrid narrow = analytic_ln_grid(0.75 * s_true, 2048);
    int wins = 0;
    const int studies = 100;
    for (int study = 0; study < studies; ++study) {
        std::mt19937_64 rng(1000 + study);
        std::normal_distribution<double> nd(0.0, 1.0);
        double l_true = 0.0, l_wide = 0.0, l_narrow = 0.0;
        for (int t = 0; t < 254; ++t) {
            const double x = std::exp(nd(rng) * s_true - 0.5 * s_true * s_true);
            l_true += std::log(std::max(pdf_at(truth, x), 1e-300));
            l_wide += std::log(std::max(pdf_at(wide, x), 1e-300));
            l_narrow += std::log(std::max(pdf_at(narrow, x), 1e-300));
        }
        if (l_true > l_wide && l_true > l_narrow) ++wins;
    }
    const double elapsed = now_seconds(t0);
    char detail[128];
    std::snprintf(detail, sizeof(detail),
                  "crps err %.2e, true model wins %d/%d, %.1fs", crps_err, wins,
                  studies, elapsed);
    report(7, "scoring matches the Gaussian oracle and ranks the true model",
           crps_err < 1e-4 && wins >= 95 && elapsed < 900.0, detail);
}

// ---- 8: size and power of the consistency tests ----------------------------

void check_test_calibration() {
    const int sims = 2000, nobs = 254;
    int size_rejects = 0;
    int jb_t3 = 0, ks_t3 = 0, ks_shift = 0;
    for (int k = 0; k < sims; ++k) {
        std::mt19937_64 rng(50000 + k);
        std::normal_distribution<double> nd(0.0, 1.0);
        std::student_t_distribution<double> td(3.0);

        std::vector<double> z(nobs), t3(nobs), shifted(nobs);
        for (int i = 0; i < nobs; ++i) {
            z[i] = nd(rng);
            t3[i] = td(rng);
            shifted[i] = nd(rng) + 0.5;
        }
        if (berkowitz_lr3(z) < 0.05) ++size_rejects;
        if (jarque_bera(t3) < 0.05) ++jb_t3;
        if (ks_normal(t3) < 0.05) ++ks_t3;
        if (ks_normal(shifted) < 0.05) ++ks_shift;
    }
    const double size = static_cast<double>(size_rejects) / sims;
    const double p_jb = static_cast<double>(jb_t3) / sims;
    const double p_ks_t3 = static_cast<double>(ks_t3) / sims;
    const double p_ks_sh = static_cast<double>(ks_shift) / sims;
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "size %.1f%%, heavy-tail power JB %.1f%% KS %.1f%%, "
                  "location-shift power KS %.1f%%",
                  100.0 * size, 100.0 * p_jb, 100.0 * p_ks_t3, 100.0 * p_ks_sh);
    // each test is gated on the alternative it targets: the moment test on
    // heavy tails, the distribution test on a location shift
    report(8, "consistency tests have nominal size and high power",
           size >= 0.03 && size <= 0.07 && p_jb >= 0.95 && p_ks_sh >= 0.95,
           detail);
}

// ---- 9: suitability-index contract -----------------------------------------

void check_ifs_contract() {
    auto stub = [](const std::string& id, double l, double c, double p) {
        ScoreSummary s;
        s.model_id = id;
        s.total_log_score = l;
        s.crps_mean = c;
        s.p_lr3 = s.p_jb = s.p_ks = p;
        return s;
    };
    bool ok = true;

    // bounded outputs over assorted inputs
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        std::vector<ScoreSummary> sums;
        for (int m = 0; m < 4; ++m) {
            sums.push_back(stub("m" + std::to_string(m), -150.0 + 100.0 * u(rng),
                                0.01 + 0.05 * u(rng), u(rng)));
        }
        ifs(sums);
        for (const ScoreSummary& s : sums) {
            if (s.ifs < 0.0 || s.ifs > 1.0 || s.l_bar < 0.0 || s.l_bar > 1.0 ||
                s.stat_bar < 0.0 || s.stat_bar > 1.0) {
                ok = false;
            }
        }
    }

    // identical models are interchangeable
    std::vector<ScoreSummary> twins = {stub("a", -100, 0.03, 0.4),
                                       stub("b", -100, 0.03, 0.4),
                                       stub("c", -100, 0.03, 0.4)};
    ifs(twins);
    if (twins[0].ifs != twins[1].ifs || twins[1].ifs != twins[2].ifs) ok = false;

    // raising one model's accuracy never lowers its own index
    double prev = -1.0;
    for (double l = -140.0; l <= -60.0; l += 1.0) {
        std::vector<ScoreSummary> sums = {stub("x", l, 0.03, 0.4),
                                          stub("y", -100.0, 0.03, 0.4),
                                          stub("z", -120.0, 0.04, 0.2)};
        ifs(sums);
        if (sums[0].ifs < prev - 1e-12) ok = false;
        prev = sums[0].ifs;
    }
    report(9, "suitability index is bounded, symmetric, and monotone", ok,
           "200 random model sets, twin symmetry, accuracy sweep");
}

// ---- 10: behavioral forecasts beat their neutral counterparts --------------

void check_behavioral_advantage() {
    const double s = 0.2 * std::sqrt(28.0 / 360.0);
    const DensityGrid f_q = analytic_ln_grid(s, 2048);
    const DensityGrid f_ra = crra_adjust(f_q, 2.0);
    SentimentState st;
    st.theta1 = -0.008;
    st.theta2 = 1.25;
    st.theta3 = 0.9;
    st.mean_active = st.vol_active = st.tail_active = true;
    const DensityGrid truth = real_world_density(f_ra, st, 0.05);

    int wins = 0;
    const int studies = 50, nobs = 254;
    for (int study = 0; study < studies; ++study) {
        std::mt19937_64 rng(7000 + study);
        std::uniform_real_distribution<double> u(1e-9, 1.0 - 1e-9);
        std::vector<ForecastRecord> matched(nobs), neutral(nobs);
        Date d{2015, 1, 16};
        for (int t = 0; t < nobs; ++t) {
            const double x = quantile(truth, u(rng));
            matched[t] = ForecastRecord{d, "rw", truth, x};
            neutral[t] = ForecastRecord{d, "ra", f_ra, x};
            d = d.add_days(28);
        }
        std::vector<ScoreSummary> sums = {summarize("rw", matched),
                                          summarize("ra", neutral)};
        ifs(sums);
        if (sums[0].ifs > sums[1].ifs) ++wins;
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "behavioral variant wins %d/%d studies",
                  wins, studies);
    report(10, "matched behavioral forecasts outperform neutral ones",
           wins >= 40, detail);
}

// ---- 11: recalibration shrinks forecast bias --------------------------------

void check_recalibration() {
    DensityGrid biased;
    biased.forward = 1.0;
    biased.tau = 28.0 / 360.0;
    const std::size_t n = 4001;
    biased.returns.resize(n);
    biased.pdf.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = 1.03 - 0.6 + 1.2 * static_cast<double>(i) /
                                         static_cast<double>(n - 1);
        biased.returns[i] = x;
        biased.pdf[i] = norm_pdf((x - 1.03) / 0.06) / 0.06;
    }
    biased = normalize(biased);

    // realizations come from a distribution centered below the forecast
    std::mt19937_64 rng(99);
    std::normal_distribution<double> nd(1.0, 0.06);
    const int nobs = 254;
    std::vector<double> xs(nobs), t_pits(nobs);
    double pit_mean = 0.0;
    for (int t = 0; t < nobs; ++t) {
        xs[t] = nd(rng);
        const double pit =
            std::clamp(cdf_at(biased, xs[t]), 1e-10, 1.0 - 1e-10);
        pit_mean += pit;
        t_pits[t] = norm_inv(pit);
    }
    pit_mean /= nobs;
    const double dev0 = std::fabs(pit_mean - 0.5);

    const DensityGrid fixed = recalibrate(biased, t_pits, 24);
    double pit_mean_rc = 0.0;
    for (int t = 0; t < nobs; ++t) {
        pit_mean_rc += std::clamp(cdf_at(fixed, xs[t]), 1e-10, 1.0 - 1e-10);
    }
    pit_mean_rc /= nobs;
    const double dev1 = std::fabs(pit_mean_rc - 0.5);

    char detail[96];
    std::snprintf(detail, sizeof(detail),
                  "mean PIT deviation %.3f -> %.3f", dev0, dev1);
    report(11, "empirical recalibration removes most of a forecaster's bias",
           dev1 <= 0.5 * dev0, detail);
}

}  // namespace

int main() {
    check_fourier_inversion();
    check_martingale();
    check_calibration_round_trip();
    check_risk_adjustment();
    check_sentiment_contracts();
    check_trigger_ranges();
    check_scoring();
    check_test_calibration();
    check_ifs_contract();
    check_behavioral_advantage();
    check_recalibration();
    if (g_failures > 0) {
        std::printf("%d acceptance check(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 11 acceptance checks passed\n");
    return 0;
}
