#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace aquafeed {

struct ScalarMinimum {
    double x;
    double value;
};

/// Golden-section search for a minimum on [lo, hi]; stops when the bracket is narrower than `tol`.
template <class F>
ScalarMinimum golden_section_minimize(F&& f, double lo, double hi, double tol, int max_iterations = 200) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < max_iterations && (hi - lo) > tol; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    return fc < fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
}

struct CoordinateSearchOptions {
    int max_sweeps = 200;
    double improvement_tolerance = 1e-9;
    int scan_points = 5;            ///< coarse grid used to bracket each line search
    double line_tolerance = 1e-4;   ///< relative to the coordinate's interval width
};

struct CoordinateSearchResult {
    std::vector<double> x;
    double value = 0.0;
    int sweeps = 0;
    long evaluations = 0;
    bool converged = false;
};

/**
 * Projected cyclic coordinate descent.
 *
 * `interval(i, x)` returns the feasible [lo, hi] for coordinate i given the
 * other coordinates of x, which lets callers express coupled move limits.
 * Each coordinate is minimized by a coarse scan that brackets the best grid
 * point, refined with golden-section search. A coordinate only moves when
 * the objective strictly improves, so the value never increases.
 */
template <class Objective, class Interval>
CoordinateSearchResult coordinate_descent(Objective&& objective, Interval&& interval, std::vector<double> x,
                                          const CoordinateSearchOptions& options = {}) {
    CoordinateSearchResult result;
    const std::size_t dim = x.size();
    for (std::size_t i = 0; i < dim; ++i) {
        const auto [lo, hi] = interval(i, x);
        x[i] = std::clamp(x[i], lo, std::max(lo, hi));
    }
    double best = objective(x);
    ++result.evaluations;

    std::vector<double> trial;
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
        const double sweep_start = best;
        for (std::size_t i = 0; i < dim; ++i) {
            auto [lo, hi] = interval(i, x);
            hi = std::max(lo, hi);
            if (hi - lo <= 0.0) {
                if (x[i] != lo) {
                    x[i] = lo;
                    best = objective(x);
                    ++result.evaluations;
                }
                continue;
            }
            trial = x;
            auto eval = [&](double v) {
                trial[i] = v;
                ++result.evaluations;
                return objective(trial);
            };

            const int points = std::max(3, options.scan_points);
            const double step = (hi - lo) / (points - 1);
            int best_k = -1;
            double best_scan = best;
            for (int k = 0; k < points; ++k) {
                const double v = k + 1 == points ? hi : lo + step * k;
                const double fv = eval(v);
                if (fv < best_scan) {
                    best_scan = fv;
                    best_k = k;
                }
            }
            double candidate = x[i];
            double candidate_value = best;
            if (best_k >= 0) {
                candidate = best_k + 1 == points ? hi : lo + step * best_k;
                candidate_value = best_scan;
            }
            // Refine around the incumbent for this coordinate.
            const double centre = candidate;
            const double a = std::max(lo, centre - step);
            const double b = std::min(hi, centre + step);
            const auto refined = golden_section_minimize(eval, a, b, options.line_tolerance * (hi - lo));
            if (refined.value < candidate_value) {
                candidate = refined.x;
                candidate_value = refined.value;
            }
            if (candidate_value < best) {
                x[i] = candidate;
                best = candidate_value;
            }
        }
        result.sweeps = sweep + 1;
        if (sweep_start - best < options.improvement_tolerance) {
            result.converged = true;
            break;
        }
    }
    result.x = std::move(x);
    result.value = best;
    return result;
}

}  // namespace aquafeed
