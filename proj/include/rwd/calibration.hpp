#pragma once

#include <cstdint>
#include <vector>

#include "rwd/char_models.hpp"
#include "rwd/density_grid.hpp"
#include "rwd/market_data.hpp"

namespace rwd {

struct CalibrationConfig {
    int restarts = 5;
    int max_iters = 400;
    std::uint64_t seed = 42;
};

struct CalibrationResult {
    ModelParams params;
    double sre = 0.0;
    int iterations = 0;
    bool converged = false;
    int restarts_used = 0;
    double worst_quote_sre = 0.0;  // largest single-quote contribution
};

// Sum of relative pricing errors over the cross-section's
// call-equivalent mids.
double sre_objective(const ModelParams& params, const CrossSection& section);

// Bounded multistart Nelder-Mead fit of the given model family to one
// cross-section. Never aborts: when no restart converges, the best
// point found is returned with converged = false.
CalibrationResult calibrate(ModelKind kind, const CrossSection& section,
                            const CalibrationConfig& config = {});

// Cubic-spline implied-volatility function in strike with flat
// extrapolation beyond the first/last knot.
class VolSurface {
public:
    VolSurface(std::vector<double> strikes, std::vector<double> vols);

    double vol_at(double strike) const;
    const std::vector<double>& strikes() const { return strikes_; }
    const std::vector<double>& vols() const { return vols_; }

private:
    std::vector<double> strikes_;
    std::vector<double> vols_;
    std::vector<double> second_derivs_;  // natural spline
};

// Implied-vol surface from a prepared cross-section; quotes whose IV
// inversion fails are dropped with fewer than 3 survivors an error.
VolSurface build_vol_surface(const CrossSection& section);

struct BlmalzDiagnostics {
    double clamped_mass = 0.0;  // negative-probability mass clamped to 0
    bool clamp_warning = false;  // more than 0.1% of total mass clamped
};

// Spline-based density: continuous call prices from the surface, CDF
// by central finite differences with step delta, pdf by a further
// central difference. delta defaults to 0.01 F.
DensityGrid blmalz_density(const VolSurface& surface, const CrossSection& section,
                           double delta, const GridSpec& spec = {},
                           BlmalzDiagnostics* diagnostics = nullptr);

}  // namespace rwd
