#include "rwd/black76.hpp"

#include <algorithm>
#include <cmath>

#include "rwd/common.hpp"
#include "rwd/stats.hpp"

namespace rwd {

double black76_call(double forward, double strike, double vol, double tau, double rate) {
    const double df = std::exp(-rate * tau);
    if (vol <= 0.0 || tau <= 0.0) {
        return df * std::max(forward - strike, 0.0);
    }
    const double s = vol * std::sqrt(tau);
    const double d1 = std::log(forward / strike) / s + 0.5 * s;
    const double d2 = d1 - s;
    return df * (forward * norm_cdf(d1) - strike * norm_cdf(d2));
}

double black76_put(double forward, double strike, double vol, double tau, double rate) {
    return black76_call(forward, strike, vol, tau, rate) -
           std::exp(-rate * tau) * (forward - strike);
}

double black76_implied_vol(double call_price, double forward, double strike,
                           double tau, double rate) {
    const double df = std::exp(-rate * tau);
    const double intrinsic = df * std::max(forward - strike, 0.0);
    const double upper_bound = df * forward;
    if (!(call_price > intrinsic) || !(call_price < upper_bound)) {
        throw NumericalError("black76_implied_vol: price outside attainable range");
    }
    double lo = 1e-4, hi = 5.0;
    const double flo = black76_call(forward, strike, lo, tau, rate) - call_price;
    const double fhi = black76_call(forward, strike, hi, tau, rate) - call_price;
    if (flo > 0.0 || fhi < 0.0) {
        throw NumericalError("black76_implied_vol: root not bracketed in [1e-4, 5]");
    }
    // The price is strictly increasing in vol, so plain bisection is
    // both robust at extreme moneyness and fast enough here.
    for (int iter = 0; iter < 100 && hi - lo > 1e-12; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = black76_call(forward, strike, mid, tau, rate) - call_price;
        if (fmid < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace rwd
