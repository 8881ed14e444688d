#include "rwd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rwd/common.hpp"

namespace rwd {

double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw NumericalError("norm_inv: p outside (0,1)");
    }
    // Acklam (2003).
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley step against the exact CDF.
    const double e = norm_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

namespace {

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw NumericalError("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // series
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    // continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double dd = 1.0 / b;
    double h = dd;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        dd = an * dd + b;
        if (std::fabs(dd) < tiny) dd = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        dd = 1.0 / dd;
        const double del = dd * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - gln) * h;
    return 1.0 - q;
}

}  // namespace

double chi2_sf(double x, int dof) {
    if (x <= 0.0) return 1.0;
    return 1.0 - gamma_p(0.5 * dof, 0.5 * x);
}

double kolmogorov_pvalue(double d_stat, int n) {
    if (d_stat <= 0.0) return 1.0;
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d_stat;
    if (lambda < 1.18) {
        // The alternating series converges too slowly for small lambda;
        // use the theta-function form of the CDF instead.
        const double t = std::exp(-std::numbers::pi * std::numbers::pi /
                                  (8.0 * lambda * lambda));
        const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda *
                           (t + std::pow(t, 9.0) + std::pow(t, 25.0) + std::pow(t, 49.0));
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

SampleMoments sample_moments(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 2) throw DataError("sample_moments: need at least 2 observations");
    SampleMoments m;
    for (double x : xs) m.mean += x;
    m.mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - m.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m.variance = m2 / static_cast<double>(n - 1);
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    const double s = std::sqrt(m2);
    m.skewness = s > 0.0 ? m3 / (s * s * s) : 0.0;
    m.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
    return m;
}

double silverman_bandwidth(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 2) throw DataError("silverman_bandwidth: need at least 2 observations");
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(n - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const double w = pos - static_cast<double>(lo);
        return lo + 1 < n ? sorted[lo] * (1.0 - w) + sorted[lo + 1] * w : sorted[lo];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    const double s = std::sqrt(sample_moments(xs).variance);
    double spread = std::min(s, iqr / 1.34);
    if (spread <= 0.0) spread = std::max(s, 1e-12);
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

GaussianKde::GaussianKde(std::vector<double> sample, double bandwidth)
    : sample_(std::move(sample)), h_(bandwidth) {
    if (sample_.empty()) throw DataError("GaussianKde: empty sample");
    if (!(h_ > 0.0)) throw NumericalError("GaussianKde: bandwidth must be > 0");
}

GaussianKde GaussianKde::with_silverman(std::vector<double> sample) {
    const double h = silverman_bandwidth(sample);
    return GaussianKde(std::move(sample), h);
}

double GaussianKde::pdf(double x) const {
    double sum = 0.0;
    for (double xi : sample_) sum += norm_pdf((x - xi) / h_);
    return sum / (static_cast<double>(sample_.size()) * h_);
}

double GaussianKde::cdf(double x) const {
    double sum = 0.0;
    for (double xi : sample_) sum += norm_cdf((x - xi) / h_);
    return sum / static_cast<double>(sample_.size());
}

}  // namespace rwd
