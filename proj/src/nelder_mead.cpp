#include "rwd/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rwd/common.hpp"

namespace rwd {

namespace {

double to_box(double u, double lo, double hi) {
    return lo + (hi - lo) / (1.0 + std::exp(-u));
}

double from_box(double x, double lo, double hi) {
    const double t = std::clamp((x - lo) / (hi - lo), 1e-12, 1.0 - 1e-12);
    return std::log(t / (1.0 - t));
}

struct Simplex {
    std::vector<std::vector<double>> pts;
    std::vector<double> fvals;

    void sort() {
        std::vector<std::size_t> order(pts.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
        std::vector<std::vector<double>> p2(pts.size());
        std::vector<double> f2(pts.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            p2[i] = std::move(pts[order[i]]);
            f2[i] = fvals[order[i]];
        }
        pts = std::move(p2);
        fvals = std::move(f2);
    }
};

}  // namespace

NelderMeadResult nelder_mead_multistart(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& lower, const std::vector<double>& upper,
    const NelderMeadConfig& config) {
    const std::size_t dim = lower.size();
    if (dim == 0 || upper.size() != dim) {
        throw DataError("nelder_mead_multistart: inconsistent bounds");
    }
    for (std::size_t i = 0; i < dim; ++i) {
        if (!(upper[i] > lower[i])) {
            throw DataError("nelder_mead_multistart: upper must exceed lower");
        }
    }

    auto eval_box = [&](const std::vector<double>& u) {
        std::vector<double> x(dim);
        for (std::size_t i = 0; i < dim; ++i) x[i] = to_box(u[i], lower[i], upper[i]);
        const double f = objective(x);
        return std::isfinite(f) ? f : std::numeric_limits<double>::max();
    };

    std::mt19937_64 rng(config.seed);
    const int restarts = std::max(config.restarts, 1);

    // Latin-hypercube seeds in box coordinates.
    std::vector<std::vector<double>> seeds(static_cast<std::size_t>(restarts),
                                           std::vector<double>(dim));
    for (std::size_t d = 0; d < dim; ++d) {
        std::vector<int> strata(static_cast<std::size_t>(restarts));
        for (int s = 0; s < restarts; ++s) strata[static_cast<std::size_t>(s)] = s;
        std::shuffle(strata.begin(), strata.end(), rng);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int s = 0; s < restarts; ++s) {
            const double t = (strata[static_cast<std::size_t>(s)] + unit(rng)) / restarts;
            seeds[static_cast<std::size_t>(s)][d] =
                from_box(lower[d] + t * (upper[d] - lower[d]), lower[d], upper[d]);
        }
    }

    for (const std::vector<double>& start : config.extra_starts) {
        if (start.size() != dim) {
            throw DataError("nelder_mead_multistart: extra start has wrong dimension");
        }
        std::vector<double> u(dim);
        for (std::size_t d = 0; d < dim; ++d) u[d] = from_box(start[d], lower[d], upper[d]);
        seeds.push_back(std::move(u));
    }

    NelderMeadResult best;
    best.fval = std::numeric_limits<double>::max();
    std::vector<double> best_u;

    auto run_from = [&](std::vector<double> seed_u, double offset) {
        Simplex s;
        s.pts.push_back(seed_u);
        for (std::size_t d = 0; d < dim; ++d) {
            auto p = seed_u;
            p[d] += offset;
            s.pts.push_back(std::move(p));
        }
        s.fvals.resize(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) s.fvals[i] = eval_box(s.pts[i]);

        for (int it = 0; it < config.max_iters; ++it) {
            s.sort();
            ++best.iterations;
            if (s.fvals[dim] - s.fvals[0] < config.ftol * (1.0 + std::fabs(s.fvals[0]))) {
                best.converged = true;
                break;
            }
            std::vector<double> centroid(dim, 0.0);
            for (std::size_t i = 0; i < dim; ++i) {
                for (std::size_t d = 0; d < dim; ++d) centroid[d] += s.pts[i][d];
            }
            for (double& c : centroid) c /= static_cast<double>(dim);

            auto blend = [&](double coef) {
                std::vector<double> p(dim);
                for (std::size_t d = 0; d < dim; ++d) {
                    p[d] = centroid[d] + coef * (centroid[d] - s.pts[dim][d]);
                }
                return p;
            };

            auto reflect = blend(1.0);
            const double f_reflect = eval_box(reflect);
            if (f_reflect < s.fvals[0]) {
                auto expand = blend(2.0);
                const double f_expand = eval_box(expand);
                if (f_expand < f_reflect) {
                    s.pts[dim] = std::move(expand);
                    s.fvals[dim] = f_expand;
                } else {
                    s.pts[dim] = std::move(reflect);
                    s.fvals[dim] = f_reflect;
                }
            } else if (f_reflect < s.fvals[dim - 1]) {
                s.pts[dim] = std::move(reflect);
                s.fvals[dim] = f_reflect;
            } else {
                const bool outside = f_reflect < s.fvals[dim];
                auto contract = blend(outside ? 0.5 : -0.5);
                const double f_contract = eval_box(contract);
                if (f_contract < std::min(f_reflect, s.fvals[dim])) {
                    s.pts[dim] = std::move(contract);
                    s.fvals[dim] = f_contract;
                } else {
                    // shrink toward the best vertex
                    for (std::size_t i = 1; i <= dim; ++i) {
                        for (std::size_t d = 0; d < dim; ++d) {
                            s.pts[i][d] = 0.5 * (s.pts[i][d] + s.pts[0][d]);
                        }
                        s.fvals[i] = eval_box(s.pts[i]);
                    }
                }
            }
        }
        s.sort();
        if (s.fvals[0] < best.fval) {
            best.fval = s.fvals[0];
            best_u = s.pts[0];
        }
    };

    for (std::size_t r = 0; r < seeds.size(); ++r) {
        run_from(seeds[r], 0.5);
        best.restarts_used = static_cast<int>(r) + 1;
    }
    for (int p = 0; p < config.polish_rounds && !best_u.empty(); ++p) {
        const double before = best.fval;
        run_from(best_u, 0.25);
        if (before - best.fval < config.ftol * (1.0 + std::fabs(before))) break;
    }

    if (best_u.empty()) best_u.assign(dim, 0.0);  // box midpoint fallback
    best.x.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        best.x[d] = to_box(best_u[d], lower[d], upper[d]);
    }
    return best;
}

}  // namespace rwd
