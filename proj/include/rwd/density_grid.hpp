#pragma once

#include <vector>

namespace rwd {

// Discretized density over gross return x = F_T / F_t. The universal
// currency between modules: every density producer emits one of these
// and every transform maps one to another on the same return grid.
struct DensityGrid {
    std::vector<double> returns;  // strictly increasing, > 0
    std::vector<double> pdf;      // density per unit gross return
    std::vector<double> cdf;      // cumulative trapezoid of pdf
    double forward = 1.0;         // F_t, for price-space conversion
    double tau = 0.0;             // forecast horizon (year fraction)

    std::size_t size() const { return returns.size(); }
};

}  // namespace rwd
