#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rwd/black76.hpp"
#include "rwd/common.hpp"

using namespace rwd;

// Reference prices frozen from an independent implementation.
TEST_CASE("forward-form call and put prices") {
    CHECK(black76_call(100, 95, 0.2, 0.25, 0.03) ==
          doctest::Approx(6.8365960170689286).epsilon(1e-12));
    CHECK(black76_put(100, 95, 0.2, 0.25, 0.03) ==
          doctest::Approx(1.8739557429732363).epsilon(1e-12));
    CHECK(black76_call(100, 100, 0.2, 28.0 / 360.0, 0.0) ==
          doctest::Approx(2.2249053086524597).epsilon(1e-12));
    CHECK(black76_call(50, 65, 0.35, 1.5, 0.01) ==
          doctest::Approx(3.9323693058765037).epsilon(1e-12));
}

TEST_CASE("put-call parity holds") {
    const double c = black76_call(120, 110, 0.3, 0.6, 0.02);
    const double p = black76_put(120, 110, 0.3, 0.6, 0.02);
    CHECK(c - p == doctest::Approx(std::exp(-0.02 * 0.6) * 10.0).epsilon(1e-12));
}

TEST_CASE("zero vol and zero tau collapse to intrinsic value") {
    CHECK(black76_call(100, 90, 0.0, 0.5, 0.0) == doctest::Approx(10.0));
    CHECK(black76_call(100, 110, 0.0, 0.5, 0.0) == doctest::Approx(0.0));
    CHECK(black76_put(100, 110, 0.2, 0.0, 0.0) == doctest::Approx(10.0));
}

TEST_CASE("implied vol round trips across moneyness") {
    for (double sigma : {0.1, 0.2, 0.55, 1.2}) {
        for (double k : {90.0, 100.0, 120.0}) {
            const double price = black76_call(100, k, sigma, 28.0 / 360.0, 0.02);
            const double iv = black76_implied_vol(price, 100, k, 28.0 / 360.0, 0.02);
            CHECK(iv == doctest::Approx(sigma).epsilon(1e-8));
        }
    }
}

TEST_CASE("prices outside the no-arbitrage band are rejected") {
    // below intrinsic
    CHECK_THROWS_AS(black76_implied_vol(4.0, 100, 95, 0.25, 0.0), NumericalError);
    // above the discounted forward
    CHECK_THROWS_AS(black76_implied_vol(101.0, 100, 95, 0.25, 0.0), NumericalError);
}
