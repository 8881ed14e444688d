#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "rwd/common.hpp"
#include "rwd/density_grid.hpp"
#include "rwd/density_ops.hpp"
#include "rwd/evaluation.hpp"
#include "rwd/stats.hpp"

using namespace rwd;

namespace {

// Gaussian gross-return density on a linear grid.
DensityGrid gauss_grid(double mean, double sd, std::size_t n = 4001,
                       double stdevs = 10.0, double forward = 1.0) {
    DensityGrid g;
    g.forward = forward;
    g.tau = 28.0 / 360.0;
    g.returns.resize(n);
    g.pdf.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = mean - stdevs * sd + 2.0 * stdevs * sd *
                                                 static_cast<double>(i) /
                                                 static_cast<double>(n - 1);
        g.returns[i] = x;
        g.pdf[i] = norm_pdf((x - mean) / sd) / sd;
    }
    return normalize(g);
}

std::vector<double> lcg_normals(std::size_t n, std::uint64_t seed = 12345) {
    std::vector<double> zs(n);
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < n; ++i) {
        state = (1103515245ULL * state + 12345ULL) % (1ULL << 31);
        zs[i] = norm_inv((static_cast<double>(state) + 0.5) /
                         static_cast<double>(1ULL << 31));
    }
    return zs;
}

ForecastRecord record(const DensityGrid& g, double realization,
                      const std::string& id = "m") {
    ForecastRecord r;
    r.obs_date = Date{2015, 1, 16};
    r.model_id = id;
    r.density = g;
    r.realization = realization;
    return r;
}

}  // namespace

TEST_CASE("squared-distance score matches the Gaussian closed form") {
    // frozen from the closed-form CRPS of N(1, 0.06^2) at x = 1.05
    const DensityGrid g = gauss_grid(1.0, 0.06);
    CHECK(crps_single(g, 1.05) ==
          doctest::Approx(0.029745211940006653).epsilon(1e-4));
    // best possible realization sits at the median
    CHECK(crps_single(g, 1.0) < crps_single(g, 1.05));
    CHECK(crps_single(g, 1.05) < crps_single(g, 1.2));
}

TEST_CASE("squared-distance score is translation invariant") {
    const DensityGrid g = gauss_grid(1.0, 0.06);
    DensityGrid shifted = g;
    for (double& x : shifted.returns) x += 0.3;
    shifted = normalize(shifted);
    CHECK(crps_single(shifted, 1.35) ==
          doctest::Approx(crps_single(g, 1.05)).epsilon(1e-10));
}

TEST_CASE("realizations beyond the grid add a linear tail penalty") {
    const DensityGrid g = gauss_grid(1.0, 0.06);
    const double edge = g.returns.back();
    CHECK(crps_single(g, edge + 0.1) ==
          doctest::Approx(crps_single(g, edge) + 0.1).epsilon(1e-10));
    const double lo = g.returns.front();
    CHECK(crps_single(g, lo - 0.1) ==
          doctest::Approx(crps_single(g, lo) + 0.1).epsilon(1e-10));
}

TEST_CASE("aggregate error is the mean root integral") {
    const DensityGrid g = gauss_grid(1.0, 0.06);
    const std::vector<ForecastRecord> recs = {record(g, 1.05), record(g, 0.98)};
    const double want = 0.5 * (std::sqrt(crps_single(g, 1.05)) +
                               std::sqrt(crps_single(g, 0.98)));
    CHECK(crps_aggregate(recs) == doctest::Approx(want).epsilon(1e-14));
    CHECK_THROWS_AS(crps_aggregate({}), DataError);
}

TEST_CASE("log score uses the price-space density") {
    DensityGrid g = gauss_grid(1.0, 0.06);
    g.forward = 100.0;
    const std::vector<ForecastRecord> recs = {record(g, 1.02)};
    const LogScoreResult ls = log_score(recs);
    CHECK(ls.total == doctest::Approx(std::log(pdf_at(g, 1.02) / 100.0)).epsilon(1e-12));
    CHECK(ls.floored == 0);
    // the mode scores better than a tail realization
    const LogScoreResult at_mode = log_score(std::vector<ForecastRecord>{record(g, 1.0)});
    const LogScoreResult in_tail =
        log_score(std::vector<ForecastRecord>{record(g, 1.3)});
    CHECK(at_mode.total > in_tail.total);
}

TEST_CASE("log score floors an underflowing density") {
    const DensityGrid g = gauss_grid(1.0, 0.06);
    // realization outside the support: pdf is exactly zero there
    const LogScoreResult ls =
        log_score(std::vector<ForecastRecord>{record(g, 5.0)});
    CHECK(ls.floored == 1);
    CHECK(ls.total == doctest::Approx(std::log(1e-300)).epsilon(1e-12));
    CHECK_THROWS_AS(log_score(std::vector<ForecastRecord>{record(g, -1.0)}),
                    DataError);
}

TEST_CASE("probability transform and its normal quantile") {
    const DensityGrid g = gauss_grid(1.0, 0.06);
    const double x975 = quantile(g, 0.975);
    const PitSeries ps = pit_series(std::vector<ForecastRecord>{record(g, x975)});
    CHECK(ps.pits[0] == doctest::Approx(0.975).epsilon(1e-6));
    CHECK(ps.t_pits[0] == doctest::Approx(1.959963984540054).epsilon(1e-4));

    // realizations outside the support are clamped, not infinite
    const PitSeries lo = pit_series(std::vector<ForecastRecord>{record(g, 0.01)});
    CHECK(lo.pits[0] == doctest::Approx(1e-10));
    CHECK(std::isfinite(lo.t_pits[0]));
}

TEST_CASE("consistency tests reproduce frozen references on a fixed sample") {
    // 254 deterministic standard-normal draws shared with an
    // independent implementation that produced the reference p-values
    const std::vector<double> z = lcg_normals(254);
    CHECK(z[0] == doctest::Approx(0.39927321279326544).epsilon(1e-12));
    CHECK(z[1] == doctest::Approx(-0.51060361063110504).epsilon(1e-12));
    CHECK(z[253] == doctest::Approx(1.7445189973646997).epsilon(1e-12));

    CHECK(berkowitz_lr3(z) == doctest::Approx(0.89034311774223518).epsilon(1e-8));
    CHECK(jarque_bera(z) == doctest::Approx(0.4961396291849236).epsilon(1e-8));
    CHECK(ks_normal(z) == doctest::Approx(0.43620754835332448).epsilon(1e-8));
}

TEST_CASE("consistency tests reject a biased sample") {
    std::vector<double> z = lcg_normals(254);
    for (double& v : z) v += 1.0;
    const double p = berkowitz_lr3(z);
    CHECK(p < 1e-40);
    CHECK(p == doctest::Approx(1.2663787330167428e-57).epsilon(1e-2));
    // normality alone is untouched by a pure location shift in JB
    CHECK(jarque_bera(z) == doctest::Approx(0.4961396291849236).epsilon(1e-8));
    CHECK(ks_normal(z) < 1e-10);
}

TEST_CASE("degenerate transformed series returns a zero p-value") {
    const std::vector<double> flat(40, 0.3);
    CHECK(berkowitz_lr3(flat) == 0.0);
    const std::vector<double> tiny(10, 0.0);
    CHECK_THROWS_AS(berkowitz_lr3(tiny), DataError);
    CHECK_THROWS_AS(jarque_bera(tiny), DataError);
    CHECK_THROWS_AS(ks_normal(tiny), DataError);
}

namespace {

ScoreSummary stub_summary(const std::string& id, double l, double crps, double p1,
                          double p2, double p3) {
    ScoreSummary s;
    s.model_id = id;
    s.total_log_score = l;
    s.crps_mean = crps;
    s.p_lr3 = p1;
    s.p_jb = p2;
    s.p_ks = p3;
    return s;
}

}  // namespace

TEST_CASE("forecasting-suitability index on hand-checked totals") {
    std::vector<ScoreSummary> sums = {
        stub_summary("a", -100.0, 0.030, 0.5, 0.5, 0.5),
        stub_summary("b", -110.0, 0.040, 0.2, 0.2, 0.2),
        stub_summary("c", -120.0, 0.050, 0.01, 0.01, 0.01),
    };
    ifs(sums);
    // the middle model sits exactly at the cross-model mean
    CHECK(sums[1].l_bar == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sums[1].crps_bar == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sums[0].l_bar > 0.5);
    CHECK(sums[2].l_bar < 0.5);
    // lower error is better
    CHECK(sums[0].crps_bar > 0.5);
    CHECK(sums[2].crps_bar < 0.5);

    // all tests passed with the best p-values -> full statistics credit
    CHECK(sums[0].stat_bar == doctest::Approx(1.0).epsilon(1e-12));
    // all tests failed with the worst p-values -> none
    CHECK(sums[2].stat_bar == doctest::Approx(0.0).epsilon(1e-12));
    // middle: three passes plus the linear p rank (0.2 between 0.01 and 0.5)
    const double rank = (0.2 - 0.01) / (0.5 - 0.01);
    CHECK(sums[1].stat_bar == doctest::Approx(0.75 + 0.25 * rank).epsilon(1e-12));

    for (const ScoreSummary& s : sums) {
        CHECK(s.ifs == doctest::Approx((s.l_bar + s.crps_bar + s.stat_bar) / 3.0)
                           .epsilon(1e-12));
        CHECK(s.ifs >= 0.0);
        CHECK(s.ifs <= 1.0);
    }
    CHECK(sums[0].ifs > sums[1].ifs);
    CHECK(sums[1].ifs > sums[2].ifs);
}

TEST_CASE("identical models share the neutral suitability score") {
    std::vector<ScoreSummary> sums = {
        stub_summary("a", -100.0, 0.03, 0.4, 0.4, 0.4),
        stub_summary("b", -100.0, 0.03, 0.4, 0.4, 0.4),
    };
    ifs(sums);
    for (const ScoreSummary& s : sums) {
        CHECK(s.l_bar == 0.5);
        CHECK(s.crps_bar == 0.5);
        CHECK(s.stat_bar == doctest::Approx(0.75 + 0.25 * 0.5).epsilon(1e-12));
    }
    std::vector<ScoreSummary> one = {stub_summary("a", -100.0, 0.03, 0.4, 0.4, 0.4)};
    CHECK_THROWS_AS(ifs(one), DataError);
}

TEST_CASE("within-model normalization uses each model's own dispersion") {
    std::vector<ScoreSummary> sums = {
        stub_summary("a", -100.0, 0.030, 0.5, 0.5, 0.5),
        stub_summary("b", -110.0, 0.040, 0.5, 0.5, 0.5),
    };
    // model a scores slightly above the cross-model center each date
    // with tight dispersion, model b slightly below
    std::vector<std::vector<double>> per_l(2), per_c(2);
    for (int t = 0; t < 50; ++t) {
        const double eps = 0.01 * ((t % 2 == 0) ? 1.0 : -1.0);
        per_l[0].push_back(-2.0 + eps);
        per_l[1].push_back(-2.2 + eps);
        per_c[0].push_back(0.030 + 0.001 * eps);
        per_c[1].push_back(0.040 + 0.001 * eps);
    }
    ifs(sums, per_l, per_c, IfsNormalization::WithinModel);
    CHECK(sums[0].l_bar > 0.5);
    CHECK(sums[1].l_bar < 0.5);
    CHECK(sums[0].crps_bar > 0.5);
    CHECK(sums[1].crps_bar < 0.5);
    // degenerate per-date series fall back to neutral
    std::vector<std::vector<double>> flat_l = {std::vector<double>(50, -2.0),
                                               std::vector<double>(50, -2.0)};
    std::vector<ScoreSummary> same = {
        stub_summary("a", -100.0, 0.03, 0.5, 0.5, 0.5),
        stub_summary("b", -100.0, 0.03, 0.5, 0.5, 0.5),
    };
    ifs(same, flat_l, flat_l, IfsNormalization::WithinModel);
    CHECK(same[0].l_bar == 0.5);
    CHECK(same[1].l_bar == 0.5);
    // missing per-date input is an error in this mode
    CHECK_THROWS_AS(ifs(sums, {}, {}, IfsNormalization::WithinModel), DataError);
}

TEST_CASE("empirical recalibration: identity below minimum history") {
    const DensityGrid g = gauss_grid(1.0, 0.06);
    const std::vector<double> tiny = lcg_normals(10);
    bool warned = false;
    const DensityGrid same = recalibrate(g, tiny, 24, &warned);
    CHECK(warned);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(same.pdf[i] == g.pdf[i]);
}

TEST_CASE("empirical recalibration is mild under a well-calibrated history") {
    const DensityGrid g = gauss_grid(1.0, 0.06);
    const std::vector<double> z = lcg_normals(254);
    bool warned = true;
    const DensityGrid rc = recalibrate(g, z, 24, &warned);
    CHECK(!warned);
    CHECK(trapezoid(rc.returns, rc.pdf) == doctest::Approx(1.0).epsilon(1e-10));
    std::vector<double> absdiff(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        absdiff[i] = std::fabs(rc.pdf[i] - g.pdf[i]);
    }
    CHECK(0.5 * trapezoid(g.returns, absdiff) < 0.05);
}

TEST_CASE("empirical recalibration corrects a biased forecaster") {
    // past realizations always came in below the forecasts, so the
    // corrected density must move its mean down
    const DensityGrid g = gauss_grid(1.0, 0.06);
    std::vector<double> z = lcg_normals(254);
    for (double& v : z) v -= 0.8;
    const DensityGrid rc = recalibrate(g, z, 24);
    CHECK(moments(rc).mean < moments(g).mean - 0.01);
    CHECK(trapezoid(rc.returns, rc.pdf) == doctest::Approx(1.0).epsilon(1e-10));
}
