#pragma once

namespace rwd {

// Black (1976) forward option pricing.
double black76_call(double forward, double strike, double vol, double tau, double rate);
double black76_put(double forward, double strike, double vol, double tau, double rate);

// Implied volatility from a call price. Bisection-secant hybrid on
// [1e-4, 5]; throws NumericalError when the price is outside the
// attainable range.
double black76_implied_vol(double call_price, double forward, double strike,
                           double tau, double rate);

}  // namespace rwd
