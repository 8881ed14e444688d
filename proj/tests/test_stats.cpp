#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "rwd/common.hpp"
#include "rwd/stats.hpp"

using namespace rwd;

TEST_CASE("normal cdf and inverse agree with reference values") {
    // reference values frozen from an independent implementation
    CHECK(norm_inv(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(norm_inv(1e-6) == doctest::Approx(-4.7534243088228987).epsilon(1e-12));
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    for (double p : {0.001, 0.05, 0.3, 0.5, 0.77, 0.999}) {
        CHECK(norm_cdf(norm_inv(p)) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK_THROWS_AS(norm_inv(0.0), NumericalError);
    CHECK_THROWS_AS(norm_inv(1.0), NumericalError);
}

TEST_CASE("chi-square survival function") {
    CHECK(chi2_sf(7.81, 3) == doctest::Approx(0.050106056350005888).epsilon(1e-10));
    CHECK(chi2_sf(0.5, 2) == doctest::Approx(0.77880078307140488).epsilon(1e-10));
    CHECK(chi2_sf(25.0, 3) == doctest::Approx(1.5440498291101365e-05).epsilon(1e-8));
    CHECK(chi2_sf(0.0, 3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kolmogorov p-value with small-sample correction") {
    CHECK(kolmogorov_pvalue(0.08, 254) ==
          doctest::Approx(0.073528346901994418).epsilon(1e-10));
    CHECK(kolmogorov_pvalue(0.001, 254) > 0.999);
    CHECK(kolmogorov_pvalue(0.5, 254) < 1e-10);
}

TEST_CASE("sample moments on a hand-checked vector") {
    const std::vector<double> xs = {1, 2, 3, 4, 5};
    const SampleMoments m = sample_moments(xs);
    CHECK(m.mean == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(m.variance == doctest::Approx(2.5).epsilon(1e-15));  // unbiased
    CHECK(m.skewness == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(m.kurtosis == doctest::Approx(1.7).epsilon(1e-12));  // m4/m2^2
}

TEST_CASE("silverman bandwidth formula") {
    // symmetric sample: sd = sqrt(2.5), iqr = 2 -> min(1.5811, 1.4925)
    const std::vector<double> xs = {1, 2, 3, 4, 5};
    const double h = silverman_bandwidth(xs);
    const double expected = 0.9 * (2.0 / 1.34) * std::pow(5.0, -0.2);
    CHECK(h == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("gaussian kde cdf is symmetric and pdf integrates to one") {
    GaussianKde kde({-1.0, 1.0}, 0.5);
    CHECK(kde.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(kde.cdf(10.0) == doctest::Approx(1.0).epsilon(1e-10));
    double mass = 0.0;
    const double dx = 0.01;
    for (double x = -8.0; x < 8.0; x += dx) {
        mass += 0.5 * (kde.pdf(x) + kde.pdf(x + dx)) * dx;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}
