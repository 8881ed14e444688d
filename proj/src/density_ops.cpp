#include "rwd/density_ops.hpp"

#include <algorithm>
#include <cmath>

#include "rwd/common.hpp"
#include "rwd/stats.hpp"

namespace rwd {

double trapezoid(std::span<const double> xs, std::span<const double> ys) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        sum += 0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i]);
    }
    return sum;
}

DensityGrid normalize(const DensityGrid& grid) {
    if (grid.returns.size() < 2 || grid.pdf.size() != grid.returns.size()) {
        throw DataError("normalize: malformed grid");
    }
    const double mass = trapezoid(grid.returns, grid.pdf);
    if (!(mass > 1e-300)) throw NumericalError("normalize: degenerate density");
    DensityGrid out = grid;
    for (double& p : out.pdf) p /= mass;
    out.cdf.resize(out.returns.size());
    out.cdf[0] = 0.0;
    for (std::size_t i = 1; i < out.returns.size(); ++i) {
        out.cdf[i] = out.cdf[i - 1] + 0.5 * (out.pdf[i - 1] + out.pdf[i]) *
                                          (out.returns[i] - out.returns[i - 1]);
    }
    return out;
}

GridMoments moments(const DensityGrid& grid) {
    const std::size_t n = grid.size();
    std::vector<double> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = grid.returns[i] * grid.pdf[i];
    GridMoments m;
    m.mean = trapezoid(grid.returns, tmp);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = grid.returns[i] - m.mean;
        tmp[i] = d * d * grid.pdf[i];
    }
    m.variance = trapezoid(grid.returns, tmp);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = grid.returns[i] - m.mean;
        tmp[i] = d * d * d * grid.pdf[i];
    }
    const double m3 = trapezoid(grid.returns, tmp);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = grid.returns[i] - m.mean;
        tmp[i] = d * d * d * d * grid.pdf[i];
    }
    const double m4 = trapezoid(grid.returns, tmp);
    m.skewness = m.variance > 0.0 ? m3 / std::pow(m.variance, 1.5) : 0.0;
    m.kurtosis = m.variance > 0.0 ? m4 / (m.variance * m.variance) : 0.0;
    return m;
}

double quantile(const DensityGrid& grid, double p) {
    if (!(p > 0.0 && p < 1.0)) throw DataError("quantile: p must be in (0,1)");
    const auto& cdf = grid.cdf;
    if (p <= cdf.front()) return grid.returns.front();
    if (p >= cdf.back()) return grid.returns.back();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), p);
    const std::size_t hi = static_cast<std::size_t>(it - cdf.begin());
    const std::size_t lo = hi - 1;
    const double dc = cdf[hi] - cdf[lo];
    const double w = dc > 0.0 ? (p - cdf[lo]) / dc : 0.5;
    return grid.returns[lo] + w * (grid.returns[hi] - grid.returns[lo]);
}

double cdf_at(const DensityGrid& grid, double x) {
    if (x <= grid.returns.front()) return 0.0;
    if (x >= grid.returns.back()) return 1.0;
    const auto it = std::lower_bound(grid.returns.begin(), grid.returns.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - grid.returns.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - grid.returns[lo]) / (grid.returns[hi] - grid.returns[lo]);
    return grid.cdf[lo] + w * (grid.cdf[hi] - grid.cdf[lo]);
}

double pdf_at(const DensityGrid& grid, double x) {
    if (x < grid.returns.front() || x > grid.returns.back()) return 0.0;
    const auto it = std::lower_bound(grid.returns.begin(), grid.returns.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - grid.returns.begin());
    if (hi == 0) return grid.pdf.front();
    const std::size_t lo = hi - 1;
    const double w = (x - grid.returns[lo]) / (grid.returns[hi] - grid.returns[lo]);
    return grid.pdf[lo] + w * (grid.pdf[hi] - grid.pdf[lo]);
}

DensityGrid crra_adjust(const DensityGrid& grid, double gamma) {
    DensityGrid out = grid;
    const double log_edge =
        std::max(std::fabs(std::log(grid.returns.front())),
                 std::fabs(std::log(grid.returns.back())));
    if (std::fabs(gamma) * log_edge > 690.0) {
        throw NumericalError("crra_adjust: tilt overflows on this grid");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.pdf[i] = grid.pdf[i] * std::pow(grid.returns[i], gamma);
    }
    return normalize(out);
}

DensityGrid utility_adjust(const DensityGrid& grid,
                           const std::function<double(double)>& marginal_utility) {
    DensityGrid out = grid;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double u = marginal_utility(grid.returns[i]);
        if (!(u > 0.0)) {
            throw DataError("utility_adjust: marginal utility must be positive "
                            "on the grid support");
        }
        out.pdf[i] = grid.pdf[i] / u;
    }
    return normalize(out);
}

BkmMoments bkm_moments(const CrossSection& section) {
    const auto& quotes = section.quotes;
    if (quotes.size() < kMinQuotes) {
        throw DataError("bkm_moments: need at least 8 quotes");
    }
    const double F = section.forward;
    if (!(quotes.front().strike < F) || !(quotes.back().strike > F)) {
        throw DataError("bkm_moments: strikes must span both sides of the forward");
    }
    const double df = std::exp(-section.rate * section.tau);

    // Piecewise integrands with the put/call split at F; the put price
    // is recovered from the call equivalent by parity.
    const std::size_t n = quotes.size();
    std::vector<double> ks(n), hv(n), hw(n), hx(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double k = quotes[i].strike;
        const double c = section.call_mids[i];
        ks[i] = k;
        if (k >= F) {
            const double lm = std::log(k / F);
            hv[i] = 2.0 * (1.0 - lm) / (k * k) * c;
            hw[i] = (6.0 * lm - 3.0 * lm * lm) / (k * k) * c;
            hx[i] = (12.0 * lm * lm - 4.0 * lm * lm * lm) / (k * k) * c;
        } else {
            const double p = c - df * (F - k);
            const double lm = std::log(F / k);
            hv[i] = 2.0 * (1.0 + lm) / (k * k) * std::max(p, 0.0);
            hw[i] = -(6.0 * lm + 3.0 * lm * lm) / (k * k) * std::max(p, 0.0);
            hx[i] = (12.0 * lm * lm + 4.0 * lm * lm * lm) / (k * k) * std::max(p, 0.0);
        }
    }
    BkmMoments out;
    out.v = trapezoid(ks, hv);
    out.w = trapezoid(ks, hw);
    out.x = trapezoid(ks, hx);
    const double erT = std::exp(section.rate * section.tau);
    out.mu = erT - 1.0 - erT * (out.v / 2.0 + out.w / 6.0 + out.x / 24.0);
    out.var_horizon = erT * out.v - out.mu * out.mu;
    if (!(out.var_horizon > 0.0)) {
        throw NumericalError("bkm_moments: non-positive implied variance (V=" +
                             std::to_string(out.v) + ", mu=" + std::to_string(out.mu) +
                             ")");
    }
    out.vol = std::sqrt(out.var_horizon) / std::sqrt(section.tau);
    const double sd3 = std::pow(out.var_horizon, 1.5);
    out.skew = (erT * out.w - 3.0 * out.mu * erT * out.v + 2.0 * std::pow(out.mu, 3)) / sd3;
    out.kurt = (erT * out.x - 4.0 * out.mu * erT * out.w +
                6.0 * erT * out.mu * out.mu * out.v - 3.0 * std::pow(out.mu, 4)) /
               (out.var_horizon * out.var_horizon);
    return out;
}

IrraResult irra_estimate(const BkmMoments& bkm, double physical_var_horizon) {
    constexpr double lo = -1.0, hi = 6.0;
    const double var_q = bkm.var_horizon;
    if (!(var_q > 0.0)) throw DataError("irra_estimate: risk-neutral variance <= 0");
    const double sd_q = std::sqrt(var_q);
    const double spread = (physical_var_horizon - var_q) / var_q;

    auto eps = [&](double g) {
        return spread - g * sd_q * bkm.skew - 0.5 * g * g * var_q * (bkm.kurt - 3.0);
    };

    // eps(g) = 0 is a quadratic in g; prefer an exact in-range root.
    const double a = -0.5 * var_q * (bkm.kurt - 3.0);
    const double b = -sd_q * bkm.skew;
    const double c = spread;
    std::vector<double> roots;
    if (std::fabs(a) < 1e-14) {
        if (std::fabs(b) > 1e-14) roots.push_back(-c / b);
    } else {
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            roots.push_back((-b + sq) / (2.0 * a));
            roots.push_back((-b - sq) / (2.0 * a));
        }
    }
    IrraResult best;
    bool found = false;
    for (double g : roots) {
        if (g < lo || g > hi) continue;
        const double e = std::fabs(eps(g));
        if (!found || e < std::fabs(best.residual) ||
            (e == std::fabs(best.residual) && std::fabs(g) < std::fabs(best.gamma))) {
            best.gamma = g;
            best.residual = eps(g);
            found = true;
        }
    }
    if (found) return best;

    // No in-range root: grid search at step 0.001 and clamp.
    double best_g = lo;
    double best_e2 = eps(lo) * eps(lo);
    for (double g = lo; g <= hi + 1e-12; g += 0.001) {
        const double e = eps(g);
        if (e * e < best_e2) {
            best_e2 = e * e;
            best_g = g;
        }
    }
    best.gamma = std::clamp(best_g, lo, hi);
    best.residual = eps(best.gamma);
    best.clamped = best.gamma == lo || best.gamma == hi;
    return best;
}

double realized_variance(std::span<const double> closes, double tau) {
    if (closes.size() < 31) {
        throw DataError("realized_variance: need at least 31 closes");
    }
    std::vector<double> rets;
    rets.reserve(closes.size() - 1);
    for (std::size_t i = 1; i < closes.size(); ++i) {
        if (!(closes[i] > 0.0) || !(closes[i - 1] > 0.0)) {
            throw DataError("realized_variance: closes must be positive");
        }
        rets.push_back(std::log(closes[i] / closes[i - 1]));
    }
    double mean = 0.0;
    for (double r : rets) mean += r;
    mean /= static_cast<double>(rets.size());
    double ss = 0.0;
    for (double r : rets) ss += (r - mean) * (r - mean);
    const double daily_var = ss / static_cast<double>(rets.size() - 1);
    return daily_var * 252.0 * tau;
}

}  // namespace rwd
