#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "rwd/density_grid.hpp"

namespace rwd {

// Lognormal (Black 76) dynamics.
struct LnParams {
    double sigma = 0.2;
};

// Square-root stochastic variance.
struct HestonParams {
    double v0 = 0.04;       // instantaneous variance
    double v_bar = 0.04;    // long-run variance
    double kappa = 1.5;     // mean-reversion speed
    double eta = 0.5;       // vol of variance
    double rho = -0.5;      // correlation of the two Wiener drivers
};

// Heston plus lognormal jumps, martingale-compensated.
struct BatesParams {
    HestonParams heston;
    double jump_intensity = 0.0;  // jumps per year
    double jump_mean = 0.0;       // mean relative jump size E[J]
    double jump_std = 0.1;        // std of log jump size
};

// Variance gamma in the (sigma, nu, theta) parameterization.
struct VgParams {
    double sigma = 0.12;
    double nu = 0.2;
    double theta = -0.14;
};

using ModelParams = std::variant<LnParams, HestonParams, BatesParams, VgParams>;

enum class ModelKind { LN, Heston, Bates, VG };

std::string model_name(const ModelParams& params);
ModelKind model_kind(const ModelParams& params);

// Throws DataError when a parameter set is outside its admissible
// region (negative variances, |rho| > 1, the VG moment restriction
// nu^{-1} > theta + sigma^2/2).
void validate_params(const ModelParams& params);
bool params_admissible(const ModelParams& params);

// Characteristic function of ln F_T under the forward measure:
// E[exp(i w ln F_T)] with E[F_T] = F. Accepts complex w, so the
// martingale identity psi(-i) = F can be checked directly.
std::complex<double> characteristic_function(const ModelParams& params,
                                             std::complex<double> w,
                                             double tau, double forward);

// Approximate standard deviation of ln(F_T/F), read off the decay of
// the characteristic function. Used to size return grids.
double log_return_stdev(const ModelParams& params, double tau);

// Gil-Pelaez CDF of F_T at the given strikes. Strikes must be
// positive and increasing; results are clamped to [0,1].
std::vector<double> cdf_from_cf(const ModelParams& params,
                                const std::vector<double>& strikes,
                                double tau, double forward);

// Undiscounted-expectation call price from the two Gil-Pelaez
// probabilities, discounted at the end.
double price_european_call(const ModelParams& params, double strike,
                           double tau, double forward, double rate);

// Batch version sharing the characteristic-function evaluations
// across strikes; this is the calibration hot path.
std::vector<double> price_european_calls(const ModelParams& params,
                                         const std::vector<double>& strikes,
                                         double tau, double forward, double rate);

struct GridSpec {
    std::size_t points = 2048;
    double stdevs = 10.0;  // half-width of the log-return grid in ATM stdevs
};

// Density over gross return x = F_T/F via central differences of the
// Gil-Pelaez CDF, renormalized to integrate to one.
DensityGrid density_from_model(const ModelParams& params, double tau,
                               double forward, const GridSpec& spec = {});

}  // namespace rwd
