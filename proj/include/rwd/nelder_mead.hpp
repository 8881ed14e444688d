#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace rwd {

// Box-constrained multistart Nelder-Mead. Coordinates are mapped to
// the unconstrained plane with a logistic transform, so the simplex
// never leaves the box and no penalty terms are needed.
struct NelderMeadConfig {
    int max_iters = 400;      // per restart
    int restarts = 5;         // Latin-hypercube seeds
    double ftol = 1e-10;      // simplex spread stopping tolerance
    std::uint64_t seed = 42;
    // Extra deterministic start points (natural units), tried in
    // addition to the Latin-hypercube seeds.
    std::vector<std::vector<double>> extra_starts;
    // Re-runs from the incumbent with a fresh small simplex, which
    // recovers from simplexes that collapsed prematurely.
    int polish_rounds = 2;
};

struct NelderMeadResult {
    std::vector<double> x;
    double fval = 0.0;
    int iterations = 0;   // across all restarts
    bool converged = false;
    int restarts_used = 0;
};

NelderMeadResult nelder_mead_multistart(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& lower, const std::vector<double>& upper,
    const NelderMeadConfig& config);

}  // namespace rwd
