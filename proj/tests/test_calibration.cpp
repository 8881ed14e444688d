#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <variant>
#include <vector>

#include "rwd/black76.hpp"
#include "rwd/calibration.hpp"
#include "rwd/char_models.hpp"
#include "rwd/common.hpp"
#include "rwd/density_ops.hpp"
#include "rwd/market_data.hpp"
#include "rwd/stats.hpp"

using namespace rwd;

namespace {

const double kTau = 28.0 / 360.0;

CrossSection section_from_model(const ModelParams& params, double forward,
                                double rate, double tau,
                                const std::vector<double>& strikes) {
    CrossSection s;
    s.obs_date = Date{2015, 1, 16};
    s.expiry_date = Date{2015, 2, 13};
    s.forward = forward;
    s.rate = rate;
    s.tau = tau;
    const std::vector<double> mids =
        price_european_calls(params, strikes, tau, forward, rate);
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        OptionQuote q;
        q.strike = strikes[i];
        q.side = strikes[i] < forward ? OptionSide::Put : OptionSide::Call;
        q.bid = q.ask = mids[i];
        s.quotes.push_back(q);
        s.call_mids.push_back(mids[i]);
    }
    return s;
}

const std::vector<double> kStrikes = {85, 88, 91, 94, 97, 100,
                                      103, 106, 109, 112, 115};

}  // namespace

TEST_CASE("pricing-error objective vanishes at the generating parameters") {
    const LnParams truth{0.22};
    const CrossSection s = section_from_model(truth, 100.0, 0.02, kTau, kStrikes);
    CHECK(sre_objective(truth, s) < 1e-10);
    CHECK(sre_objective(LnParams{0.25}, s) > 0.01);
}

TEST_CASE("lognormal calibration round trip") {
    const CrossSection s =
        section_from_model(LnParams{0.25}, 100.0, 0.02, kTau, kStrikes);
    const CalibrationResult r = calibrate(ModelKind::LN, s);
    REQUIRE(std::holds_alternative<LnParams>(r.params));
    CHECK(std::get<LnParams>(r.params).sigma == doctest::Approx(0.25).epsilon(1e-4));
    CHECK(r.sre < 1e-6);
    CHECK(r.converged);
    // flat surface: the fitted vol equals the at-the-money implied vol
    CHECK(std::get<LnParams>(r.params).sigma ==
          doctest::Approx(atm_implied_vol(s)).epsilon(1e-4));
    // reported objective is consistent with the returned parameters
    CHECK(sre_objective(r.params, s) == doctest::Approx(r.sre).epsilon(1e-12));
}

TEST_CASE("calibration is deterministic across repeated runs") {
    const CrossSection s =
        section_from_model(HestonParams{0.04, 0.05, 1.5, 0.5, -0.6}, 100.0, 0.02,
                           kTau, kStrikes);
    const CalibrationResult a = calibrate(ModelKind::LN, s);
    const CalibrationResult b = calibrate(ModelKind::LN, s);
    CHECK(std::get<LnParams>(a.params).sigma == std::get<LnParams>(b.params).sigma);
    CHECK(a.sre == b.sre);
    CHECK(a.restarts_used == b.restarts_used);
}

TEST_CASE("stochastic-volatility calibration reprices the cross-section") {
    const HestonParams truth{0.04, 0.05, 1.5, 0.5, -0.6};
    const CrossSection s = section_from_model(truth, 100.0, 0.02, kTau, kStrikes);
    const CalibrationResult r = calibrate(ModelKind::Heston, s);
    CHECK(r.sre < 1e-3);
    CHECK(r.worst_quote_sre <= r.sre + 1e-15);
    REQUIRE(std::holds_alternative<HestonParams>(r.params));
    // short-horizon identification: instantaneous variance is pinned down
    CHECK(std::get<HestonParams>(r.params).v0 ==
          doctest::Approx(truth.v0).epsilon(0.15));
}

TEST_CASE("degenerate quotes are rejected by the objective") {
    CrossSection s =
        section_from_model(LnParams{0.2}, 100.0, 0.02, kTau, kStrikes);
    s.call_mids[3] = 0.0;
    CHECK_THROWS_AS(sre_objective(LnParams{0.2}, s), DataError);
}

TEST_CASE("vol surface reproduces knots and a frozen spline oracle") {
    const VolSurface surf({80, 90, 100, 110, 120}, {0.28, 0.24, 0.21, 0.215, 0.23});
    CHECK(surf.vol_at(90.0) == doctest::Approx(0.24).epsilon(1e-14));
    CHECK(surf.vol_at(120.0) == doctest::Approx(0.23).epsilon(1e-14));
    // frozen from an independent natural cubic spline implementation
    CHECK(surf.vol_at(95.0) == doctest::Approx(0.2216517857142857).epsilon(1e-12));
    CHECK(surf.vol_at(104.0) == doctest::Approx(0.2085885714285714).epsilon(1e-12));
    // flat extrapolation
    CHECK(surf.vol_at(50.0) == doctest::Approx(0.28).epsilon(1e-14));
    CHECK(surf.vol_at(200.0) == doctest::Approx(0.23).epsilon(1e-14));
}

TEST_CASE("flat quotes produce a flat vol surface") {
    const CrossSection s =
        section_from_model(LnParams{0.2}, 100.0, 0.02, kTau, kStrikes);
    const VolSurface surf = build_vol_surface(s);
    for (double k : {85.0, 92.5, 100.0, 107.0, 115.0, 130.0}) {
        CHECK(surf.vol_at(k) == doctest::Approx(0.2).epsilon(1e-7));
    }
}

TEST_CASE("spline density recovers the lognormal on a flat surface") {
    // annual horizon keeps the finite-difference bias below the bound
    const double sigma = 0.3, tau = 1.0;
    CrossSection s = section_from_model(LnParams{sigma}, 100.0, 0.02, tau, kStrikes);
    s.tau = tau;
    const VolSurface surf = build_vol_surface(s);
    BlmalzDiagnostics diag;
    const DensityGrid g = blmalz_density(surf, s, 0.01 * s.forward, {}, &diag);

    CHECK(trapezoid(g.returns, g.pdf) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(!diag.clamp_warning);
    CHECK(diag.clamped_mass < 1e-3);

    double max_err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.returns[i];
        const double z = (std::log(x) + 0.5 * sigma * sigma) / sigma;
        const double want = norm_pdf(z) / (x * sigma);
        max_err = std::max(max_err, std::fabs(g.pdf[i] - want));
    }
    CHECK(max_err < 5e-4);

    // distribution-function axioms
    CHECK(g.cdf.front() == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(g.cdf.back() == doctest::Approx(1.0).epsilon(1e-6));
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(g.cdf[i] >= g.cdf[i - 1] - 1e-8);
    }
}

TEST_CASE("spline density is robust to the finite-difference step") {
    const double sigma = 0.25, tau = 1.0;
    CrossSection s = section_from_model(LnParams{sigma}, 100.0, 0.02, tau, kStrikes);
    s.tau = tau;
    const VolSurface surf = build_vol_surface(s);
    const DensityGrid base = blmalz_density(surf, s, 0.01 * s.forward);
    for (double delta : {0.005 * s.forward, 0.02 * s.forward}) {
        const DensityGrid alt = blmalz_density(surf, s, delta);
        std::vector<double> absdiff(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            absdiff[i] = std::fabs(base.pdf[i] - alt.pdf[i]);
        }
        const double tv = 0.5 * trapezoid(base.returns, absdiff);
        CHECK(tv < 1e-3);
    }
}

TEST_CASE("too few invertible quotes fail surface construction") {
    CrossSection s = section_from_model(LnParams{0.2}, 100.0, 0.02, kTau,
                                        {90, 100, 110});
    // push the two outer mids outside the attainable price band
    s.call_mids[0] = 1e-12;
    s.call_mids[2] = 200.0;
    CHECK_THROWS_AS(build_vol_surface(s), DataError);
}
