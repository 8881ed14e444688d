#include "rwd/char_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rwd/common.hpp"
#include "rwd/density_ops.hpp"

namespace rwd {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

// Characteristic function of the centered log return ln(F_T / F_t),
// i.e. with the ln F term factored out. Keeping frequencies O(1) in
// log-moneyness makes the Fourier quadrature cheap.
cplx cf_centered(const LnParams& p, cplx w, double tau) {
    const double v = p.sigma * p.sigma * tau;
    return std::exp(-kI * w * (0.5 * v) - 0.5 * w * w * v);
}

cplx cf_centered(const HestonParams& p, cplx w, double tau) {
    // Branch-cut-safe formulation (principal square root, log argument
    // kept in the right half plane); D written with the (iw + w^2)
    // factor explicit so the martingale point w = -i is exact.
    const cplx iw = kI * w;
    const cplx u = iw + w * w;
    const cplx xi = p.kappa - p.rho * p.eta * iw;
    const cplx d = std::sqrt(xi * xi + p.eta * p.eta * u);
    const cplx emdt = std::exp(-d * tau);
    const cplx denom = (xi + d) - (xi - d) * emdt;
    const cplx D = -u * (1.0 - emdt) / denom;
    const cplx C = p.kappa * p.v_bar / (p.eta * p.eta) *
                   ((xi - d) * tau - 2.0 * std::log(denom / (2.0 * d)));
    return std::exp(C + D * p.v0);
}

cplx cf_centered(const BatesParams& p, cplx w, double tau) {
    const cplx base = cf_centered(p.heston, w, tau);
    if (p.jump_intensity <= 0.0) return base;
    const double nu2 = p.jump_std * p.jump_std;
    // log jump ~ N(m, nu2) with E[e^Y] = 1 + jump_mean
    const double m = std::log1p(p.jump_mean) - 0.5 * nu2;
    const cplx iw = kI * w;
    const cplx jump_cf = std::exp(iw * m - 0.5 * w * w * nu2);
    const cplx comp = p.jump_intensity * tau * (jump_cf - 1.0) -
                      iw * (p.jump_intensity * p.jump_mean * tau);
    return base * std::exp(comp);
}

cplx cf_centered(const VgParams& p, cplx w, double tau) {
    const double omega =
        std::log(1.0 - p.theta * p.nu - 0.5 * p.sigma * p.sigma * p.nu) / p.nu;
    const cplx iw = kI * w;
    const cplx arg = 1.0 - iw * (p.theta * p.nu) + 0.5 * p.sigma * p.sigma * p.nu * w * w;
    return std::exp(iw * (omega * tau) - (tau / p.nu) * std::log(arg));
}

cplx cf_centered(const ModelParams& params, cplx w, double tau) {
    return std::visit([&](const auto& p) { return cf_centered(p, w, tau); }, params);
}

// 12-point Gauss-Legendre on [0, 1].
constexpr int kGl = 12;
constexpr double kGlX[kGl] = {
    0.0092196828766404, 0.0479413718147626, 0.1150486629028477, 0.2063410228566913,
    0.3160842505009099, 0.4373832957442655, 0.5626167042557345, 0.6839157494990901,
    0.7936589771433087, 0.8849513370971523, 0.9520586281852374, 0.9907803171233596};
constexpr double kGlW[kGl] = {
    0.0235876681932559, 0.0534696629976592, 0.0800391642716731, 0.1015837133615330,
    0.1167462682691774, 0.1245735229067014, 0.1245735229067014, 0.1167462682691774,
    0.1015837133615330, 0.0800391642716731, 0.0534696629976592, 0.0235876681932559};

// Composite Gauss-Legendre rule over w in (0, W] with equal panels and
// the weighted CF values premultiplied: coef_k = weight_k psi(w_k)/w_k.
struct FourierRule {
    double h = 1.0;
    int panels = 0;
    std::vector<cplx> coef;  // panels * kGl

    // 1/pi * integral of Im[e^{-iwx} psi(w)] / w dw
    double oscillatory_integral(double x) const {
        const cplx rot = std::exp(-kI * (h * x));
        cplx base[kGl];
        for (int l = 0; l < kGl; ++l) base[l] = std::exp(-kI * (kGlX[l] * h * x));
        cplx cur{1.0, 0.0};
        double sum = 0.0;
        const cplx* c = coef.data();
        for (int m = 0; m < panels; ++m) {
            for (int l = 0; l < kGl; ++l) sum += std::imag(cur * base[l] * c[l]);
            c += kGl;
            cur *= rot;
            if ((m & 255) == 255) cur /= std::abs(cur);  // keep |cur| = 1
        }
        return sum / std::numbers::pi;
    }
};

constexpr double kCfTailTol = 1e-12;
constexpr double kMaxFreq = 2.0e4;  // hard cap on the integration domain

template <typename Cf>
FourierRule build_rule(Cf&& cf, double scale, double xmax, double h_shrink = 1.0) {
    FourierRule rule;
    const double s = std::max(scale, 1e-4);
    rule.h = std::min(0.7 / s, 2.0 / std::max(xmax, 1.0)) * h_shrink;
    double W = std::min(10.0 / s, kMaxFreq);
    while (W < kMaxFreq && std::abs(cf(W)) / W > kCfTailTol) W = std::min(W * 1.5, kMaxFreq);
    rule.panels = static_cast<int>(std::ceil(W / rule.h));
    rule.coef.resize(static_cast<std::size_t>(rule.panels) * kGl);
    for (int m = 0; m < rule.panels; ++m) {
        for (int l = 0; l < kGl; ++l) {
            const double w = (m + kGlX[l]) * rule.h;
            rule.coef[static_cast<std::size_t>(m) * kGl + l] =
                kGlW[l] * rule.h * cf(w) / w;
        }
    }
    return rule;
}

double max_abs_log_moneyness(const std::vector<double>& strikes, double forward) {
    double xmax = 0.0;
    for (double k : strikes) xmax = std::max(xmax, std::abs(std::log(k / forward)));
    return xmax;
}

}  // namespace

std::string model_name(const ModelParams& params) {
    switch (model_kind(params)) {
        case ModelKind::LN: return "LN";
        case ModelKind::Heston: return "HESTON";
        case ModelKind::Bates: return "BATES";
        case ModelKind::VG: return "VG";
    }
    return "?";
}

ModelKind model_kind(const ModelParams& params) {
    return static_cast<ModelKind>(params.index());
}

bool params_admissible(const ModelParams& params) {
    struct Check {
        bool operator()(const LnParams& p) const { return p.sigma > 0.0; }
        bool operator()(const HestonParams& p) const {
            return p.v0 >= 0.0 && p.v_bar >= 0.0 && p.kappa >= 0.0 && p.eta >= 0.0 &&
                   p.rho >= -1.0 && p.rho <= 1.0 && (p.v0 > 0.0 || p.v_bar > 0.0);
        }
        bool operator()(const BatesParams& p) const {
            return (*this)(p.heston) && p.jump_intensity >= 0.0 && p.jump_std >= 0.0 &&
                   p.jump_mean > -1.0;
        }
        bool operator()(const VgParams& p) const {
            return p.sigma > 0.0 && p.nu > 0.0 &&
                   1.0 / p.nu > p.theta + 0.5 * p.sigma * p.sigma;
        }
    };
    return std::visit(Check{}, params);
}

void validate_params(const ModelParams& params) {
    if (!params_admissible(params)) {
        throw DataError("inadmissible parameters for model " + model_name(params));
    }
}

std::complex<double> characteristic_function(const ModelParams& params,
                                             std::complex<double> w,
                                             double tau, double forward) {
    if (!(tau > 0.0) || !(forward > 0.0)) {
        throw DataError("characteristic_function: tau and forward must be positive");
    }
    validate_params(params);
    return std::exp(kI * w * std::log(forward)) * cf_centered(params, w, tau);
}

double log_return_stdev(const ModelParams& params, double tau) {
    validate_params(params);
    double h = 1.0;
    double p = std::abs(cf_centered(params, h, tau));
    for (int i = 0; i < 60 && p > 0.98; ++i) p = std::abs(cf_centered(params, h *= 2.0, tau));
    for (int i = 0; i < 60 && p < 0.5; ++i) p = std::abs(cf_centered(params, h *= 0.5, tau));
    if (!(p > 0.0 && p < 1.0)) throw NumericalError("log_return_stdev: degenerate CF");
    return std::sqrt(-2.0 * std::log(p)) / h;
}

std::vector<double> cdf_from_cf(const ModelParams& params,
                                const std::vector<double>& strikes,
                                double tau, double forward) {
    if (!(tau > 0.0) || !(forward > 0.0)) {
        throw DataError("cdf_from_cf: tau and forward must be positive");
    }
    validate_params(params);
    if (!std::is_sorted(strikes.begin(), strikes.end()) ||
        (!strikes.empty() && strikes.front() <= 0.0)) {
        throw DataError("cdf_from_cf: strikes must be positive and increasing");
    }
    const double s = log_return_stdev(params, tau);
    const double xmax = max_abs_log_moneyness(strikes, forward);
    auto cf = [&](double w) { return cf_centered(params, cplx{w, 0.0}, tau); };

    // Gil-Pelaez: CDF(k) = 1/2 - (1/pi) int Im[e^{-iw ln(k/F)} psi0(w)]/w dw.
    // Refine the panel width until two probe evaluations agree.
    FourierRule rule = build_rule(cf, s, xmax);
    const double probe = std::exp(1.5 * s) * forward;
    double ref = 0.5 - build_rule(cf, s, xmax, 0.5).oscillatory_integral(std::log(probe / forward));
    for (int attempt = 0;; ++attempt) {
        const double got = 0.5 - rule.oscillatory_integral(std::log(probe / forward));
        if (std::abs(got - ref) < 1e-9) break;
        if (attempt >= 3) {
            throw NumericalError("cdf_from_cf: quadrature failed to converge at strike " +
                                 std::to_string(probe));
        }
        rule = build_rule(cf, s, xmax, std::pow(0.5, attempt + 1));
        ref = 0.5 - build_rule(cf, s, xmax, std::pow(0.5, attempt + 2))
                        .oscillatory_integral(std::log(probe / forward));
    }

    std::vector<double> out(strikes.size());
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        const double x = std::log(strikes[i] / forward);
        out[i] = std::clamp(0.5 - rule.oscillatory_integral(x), 0.0, 1.0);
    }
    return out;
}

std::vector<double> price_european_calls(const ModelParams& params,
                                         const std::vector<double>& strikes,
                                         double tau, double forward, double rate) {
    validate_params(params);
    for (double k : strikes) {
        if (!(k > 0.0)) throw DataError("price_european_call: strike must be positive");
    }
    const double s = log_return_stdev(params, tau);
    const double xmax = max_abs_log_moneyness(strikes, forward);
    auto cf0 = [&](double w) { return cf_centered(params, cplx{w, 0.0}, tau); };
    // Share-measure CF; psi0(-i) = 1 analytically, divide out the
    // residual so P1 is exactly calibrated.
    const cplx norm = cf_centered(params, cplx{0.0, -1.0}, tau);
    auto cf1 = [&](double w) { return cf_centered(params, cplx{w, -1.0}, tau) / norm; };
    const FourierRule rule0 = build_rule(cf0, s, xmax);
    const FourierRule rule1 = build_rule(cf1, s, xmax);
    const double df = std::exp(-rate * tau);
    std::vector<double> out(strikes.size());
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        const double x = std::log(strikes[i] / forward);
        const double p1 = std::clamp(0.5 + rule1.oscillatory_integral(x), 0.0, 1.0);
        const double p2 = std::clamp(0.5 + rule0.oscillatory_integral(x), 0.0, 1.0);
        out[i] = df * (forward * p1 - strikes[i] * p2);
    }
    return out;
}

double price_european_call(const ModelParams& params, double strike,
                           double tau, double forward, double rate) {
    return price_european_calls(params, {strike}, tau, forward, rate).front();
}

DensityGrid density_from_model(const ModelParams& params, double tau,
                               double forward, const GridSpec& spec) {
    const double s = log_return_stdev(params, tau);
    DensityGrid grid;
    grid.forward = forward;
    grid.tau = tau;
    grid.returns.resize(spec.points);
    const double lo = -spec.stdevs * s;
    const double hi = spec.stdevs * s;
    for (std::size_t j = 0; j < spec.points; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(spec.points - 1);
        grid.returns[j] = std::exp(lo + (hi - lo) * t);
    }
    std::vector<double> strikes(spec.points);
    for (std::size_t j = 0; j < spec.points; ++j) strikes[j] = forward * grid.returns[j];
    const std::vector<double> cdf = cdf_from_cf(params, strikes, tau, forward);
    for (std::size_t j = 0; j + 1 < spec.points; ++j) {
        if (cdf[j] - cdf[j + 1] > 1e-8) {
            throw NumericalError("density_from_model: CDF not monotone within tolerance");
        }
    }
    grid.pdf.resize(spec.points);
    for (std::size_t j = 0; j < spec.points; ++j) {
        const std::size_t a = j == 0 ? 0 : j - 1;
        const std::size_t b = j + 1 == spec.points ? j : j + 1;
        grid.pdf[j] = std::max(
            (cdf[b] - cdf[a]) / (grid.returns[b] - grid.returns[a]), 0.0);
    }
    return normalize(grid);
}

}  // namespace rwd
