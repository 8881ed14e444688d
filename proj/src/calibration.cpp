#include "rwd/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwd/black76.hpp"
#include "rwd/common.hpp"
#include "rwd/density_ops.hpp"
#include "rwd/nelder_mead.hpp"

namespace rwd {

namespace {

struct ParamBox {
    std::vector<double> lower;
    std::vector<double> upper;
    ModelParams (*decode)(const std::vector<double>&);
};

ParamBox param_box(ModelKind kind) {
    switch (kind) {
        case ModelKind::LN:
            return {{0.01}, {2.0}, [](const std::vector<double>& x) {
                        return ModelParams{LnParams{x[0]}};
                    }};
        case ModelKind::Heston:
            return {{1e-4, 1e-4, 0.01, 0.01, -0.999},
                    {1.0, 1.0, 10.0, 3.0, 0.999},
                    [](const std::vector<double>& x) {
                        return ModelParams{HestonParams{x[0], x[1], x[2], x[3], x[4]}};
                    }};
        case ModelKind::Bates:
            return {{1e-4, 1e-4, 0.01, 0.01, -0.999, 0.0, -0.5, 1e-3},
                    {1.0, 1.0, 10.0, 3.0, 0.999, 5.0, 0.5, 0.6},
                    [](const std::vector<double>& x) {
                        return ModelParams{BatesParams{
                            HestonParams{x[0], x[1], x[2], x[3], x[4]}, x[5], x[6], x[7]}};
                    }};
        case ModelKind::VG:
            return {{0.01, 1e-3, -1.0},
                    {1.0, 2.0, 1.0},
                    [](const std::vector<double>& x) {
                        return ModelParams{VgParams{x[0], x[1], x[2]}};
                    }};
    }
    throw DataError("param_box: unknown model kind");
}

}  // namespace

double sre_objective(const ModelParams& params, const CrossSection& section) {
    if (section.quotes.empty() || section.call_mids.size() != section.quotes.size()) {
        throw DataError("sre_objective: cross-section has no call-equivalent mids");
    }
    std::vector<double> strikes(section.quotes.size());
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        if (!(section.call_mids[i] > 0.0)) {
            throw DataError("sre_objective: non-positive market price at strike " +
                            std::to_string(section.quotes[i].strike) +
                            " (upstream filter bug)");
        }
        strikes[i] = section.quotes[i].strike;
    }
    const std::vector<double> model = price_european_calls(
        params, strikes, section.tau, section.forward, section.rate);
    double sre = 0.0;
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        sre += std::fabs(section.call_mids[i] - model[i]) / section.call_mids[i];
    }
    return sre;
}

CalibrationResult calibrate(ModelKind kind, const CrossSection& section,
                            const CalibrationConfig& config) {
    if (section.quotes.size() < kMinQuotes) {
        throw DataError("calibrate: fewer than 8 quotes on " +
                        section.obs_date.to_string());
    }
    const ParamBox box = param_box(kind);

    auto objective = [&](const std::vector<double>& x) {
        const ModelParams params = box.decode(x);
        if (!params_admissible(params)) {
            return std::numeric_limits<double>::max();  // rejection
        }
        try {
            return sre_objective(params, section);
        } catch (const NumericalError&) {
            return std::numeric_limits<double>::max();
        }
    };

    NelderMeadConfig nm;
    nm.restarts = std::max(config.restarts, 5);
    nm.max_iters = config.max_iters;
    nm.seed = config.seed;
    nm.polish_rounds = 4;
    // Seed one start from the ATM level: the variance scale is the hardest
    // coordinate for blind multistart to find.
    try {
        const double atm = atm_implied_vol(section);
        const double v = atm * atm;
        switch (kind) {
            case ModelKind::LN:
                nm.extra_starts.push_back({atm});
                break;
            case ModelKind::Heston:
                nm.extra_starts.push_back({v, v, 1.5, 0.5, -0.5});
                nm.extra_starts.push_back({v, v, 3.0, 1.0, -0.7});
                break;
            case ModelKind::Bates:
                nm.extra_starts.push_back({v, v, 1.5, 0.5, -0.5, 0.5, -0.05, 0.1});
                break;
            case ModelKind::VG:
                nm.extra_starts.push_back({atm, 0.2, -0.1});
                break;
        }
        for (std::vector<double>& start : nm.extra_starts) {
            for (std::size_t i = 0; i < start.size(); ++i) {
                const double span = box.upper[i] - box.lower[i];
                start[i] = std::clamp(start[i], box.lower[i] + 1e-6 * span,
                                      box.upper[i] - 1e-6 * span);
            }
        }
    } catch (const std::runtime_error&) {
        // no ATM level available; fall back to the random seeds alone
    }
    const NelderMeadResult r =
        nelder_mead_multistart(objective, box.lower, box.upper, nm);

    CalibrationResult out;
    out.params = box.decode(r.x);
    out.sre = r.fval;
    out.iterations = r.iterations;
    out.converged = r.converged;
    out.restarts_used = r.restarts_used;

    // diagnostics: largest single-quote contribution to the SRE
    std::vector<double> strikes(section.quotes.size());
    for (std::size_t i = 0; i < strikes.size(); ++i) strikes[i] = section.quotes[i].strike;
    const std::vector<double> model = price_european_calls(
        out.params, strikes, section.tau, section.forward, section.rate);
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        out.worst_quote_sre =
            std::max(out.worst_quote_sre,
                     std::fabs(section.call_mids[i] - model[i]) / section.call_mids[i]);
    }
    return out;
}

VolSurface::VolSurface(std::vector<double> strikes, std::vector<double> vols)
    : strikes_(std::move(strikes)), vols_(std::move(vols)) {
    const std::size_t n = strikes_.size();
    if (n < 3 || vols_.size() != n) {
        throw DataError("VolSurface: need at least 3 (strike, vol) knots");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(vols_[i] > 0.0)) throw DataError("VolSurface: vols must be positive");
        if (i > 0 && !(strikes_[i] > strikes_[i - 1])) {
            throw DataError("VolSurface: strikes must be strictly increasing");
        }
    }
    // Natural cubic spline second derivatives (tridiagonal solve).
    second_derivs_.assign(n, 0.0);
    std::vector<double> u(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double sig = (strikes_[i] - strikes_[i - 1]) /
                           (strikes_[i + 1] - strikes_[i - 1]);
        const double p = sig * second_derivs_[i - 1] + 2.0;
        second_derivs_[i] = (sig - 1.0) / p;
        u[i] = (vols_[i + 1] - vols_[i]) / (strikes_[i + 1] - strikes_[i]) -
               (vols_[i] - vols_[i - 1]) / (strikes_[i] - strikes_[i - 1]);
        u[i] = (6.0 * u[i] / (strikes_[i + 1] - strikes_[i - 1]) - sig * u[i - 1]) / p;
    }
    second_derivs_[n - 1] = 0.0;
    for (std::size_t i = n - 1; i-- > 0;) {
        second_derivs_[i] = second_derivs_[i] * second_derivs_[i + 1] + u[i];
    }
}

double VolSurface::vol_at(double strike) const {
    if (strike <= strikes_.front()) return vols_.front();   // flat extrapolation
    if (strike >= strikes_.back()) return vols_.back();
    const auto it = std::upper_bound(strikes_.begin(), strikes_.end(), strike);
    const std::size_t hi = static_cast<std::size_t>(it - strikes_.begin());
    const std::size_t lo = hi - 1;
    const double h = strikes_[hi] - strikes_[lo];
    const double a = (strikes_[hi] - strike) / h;
    const double b = (strike - strikes_[lo]) / h;
    return a * vols_[lo] + b * vols_[hi] +
           ((a * a * a - a) * second_derivs_[lo] + (b * b * b - b) * second_derivs_[hi]) *
               h * h / 6.0;
}

VolSurface build_vol_surface(const CrossSection& section) {
    std::vector<double> strikes, vols;
    for (std::size_t i = 0; i < section.quotes.size(); ++i) {
        try {
            const double iv =
                black76_implied_vol(section.call_mids[i], section.forward,
                                    section.quotes[i].strike, section.tau, section.rate);
            strikes.push_back(section.quotes[i].strike);
            vols.push_back(iv);
        } catch (const NumericalError&) {
            // quote dropped
        }
    }
    if (strikes.size() < 3) {
        throw DataError("build_vol_surface: fewer than 3 invertible quotes on " +
                        section.obs_date.to_string());
    }
    return VolSurface(std::move(strikes), std::move(vols));
}

DensityGrid blmalz_density(const VolSurface& surface, const CrossSection& section,
                           double delta, const GridSpec& spec,
                           BlmalzDiagnostics* diagnostics) {
    if (!(delta > 0.0)) throw DataError("blmalz_density: delta must be positive");
    const double F = section.forward;
    const double tau = section.tau;
    const double rate = section.rate;
    const double s = surface.vol_at(F) * std::sqrt(tau);

    auto call_at = [&](double k) {
        k = std::max(k, 1e-8 * F);
        return black76_call(F, k, surface.vol_at(k), tau, rate);
    };
    auto cdf_at_strike = [&](double k) {
        return 1.0 + std::exp(rate * tau) *
                         (call_at(k + 0.5 * delta) - call_at(k - 0.5 * delta)) / delta;
    };

    DensityGrid grid;
    grid.forward = F;
    grid.tau = tau;
    grid.returns.resize(spec.points);
    grid.pdf.resize(spec.points);
    const double lo = -spec.stdevs * s;
    const double hi = spec.stdevs * s;
    double clamped = 0.0;
    double total = 0.0;
    for (std::size_t j = 0; j < spec.points; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(spec.points - 1);
        grid.returns[j] = std::exp(lo + (hi - lo) * t);
        const double k = F * grid.returns[j];
        // pdf per strike, then per gross return via the F Jacobian
        const double pdf_k =
            (cdf_at_strike(k + 0.5 * delta) - cdf_at_strike(k - 0.5 * delta)) / delta;
        const double pdf_x = pdf_k * F;
        total += std::fabs(pdf_x);
        if (pdf_x < 0.0) {
            clamped += -pdf_x;
            grid.pdf[j] = 0.0;
        } else {
            grid.pdf[j] = pdf_x;
        }
    }
    if (diagnostics != nullptr) {
        diagnostics->clamped_mass = total > 0.0 ? clamped / total : 0.0;
        diagnostics->clamp_warning = diagnostics->clamped_mass > 1e-3;
    }
    return normalize(grid);
}

}  // namespace rwd
