#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "aquafeed/growth.hpp"
#include "aquafeed/model.hpp"
#include "aquafeed/optimize.hpp"

namespace aquafeed {

/// Feed-only receding-horizon tracking controller settings.
struct Mpc1Config {
    int horizon = 6;
    double lambda = 0.002;
    double f_min = 0.1;
    double f_max = 1.0;
    double w0 = 6.24;  ///< lower mean-weight bound [g]
    double w_end = std::numeric_limits<double>::infinity();
    std::optional<double> max_feed_move;  ///< |f_k - f_{k-1}| bound; disabled by default
    double state_penalty = 1e6;
    int steps_per_day = default_steps_per_day;
    int descent_starts = 1;
    StockingPolicy stocking{};
    CoordinateSearchOptions search{};

    void validate() const {
        if (horizon < 1) throw std::invalid_argument("Mpc1Config: horizon must be >= 1");
        if (!(lambda >= 0.0)) throw std::invalid_argument("Mpc1Config: lambda must be >= 0");
        if (!(f_min <= f_max)) throw std::invalid_argument("Mpc1Config: f_min must not exceed f_max");
        if (!(w0 < w_end)) throw std::invalid_argument("Mpc1Config: w0 must be below w_end");
        if (max_feed_move && !(*max_feed_move >= 0.0))
            throw std::invalid_argument("Mpc1Config: max_feed_move must be >= 0");
    }
};

/// Joint feed and water-quality controller settings. Input order is (f, T, DO, UIA).
struct Mpc2Config {
    int horizon = 5;
    double lambda1 = 0.001;
    double lambda2 = 0.2;
    double lambda3 = 0.5;
    double lambda4 = 0.5;
    EnvInput lower{0.1, 24.0, 0.3, 0.0};
    EnvInput upper{1.0, 40.0, 10.0, 1.4};
    double T_d = 33.0;
    double DO_d = 5.0;
    double UIA_d = 0.03;
    double w0 = 6.24;
    double w_end = std::numeric_limits<double>::infinity();
    std::optional<EnvInput> max_move;  ///< per-dimension |u_k - u_{k-1}| bound; disabled by default
    double state_penalty = 1e6;
    int steps_per_day = default_steps_per_day;
    int descent_starts = 1;
    StockingPolicy stocking{};
    CoordinateSearchOptions search{};

    void validate() const {
        if (horizon < 1) throw std::invalid_argument("Mpc2Config: horizon must be >= 1");
        if (!(lambda1 >= 0.0 && lambda2 >= 0.0 && lambda3 >= 0.0 && lambda4 >= 0.0))
            throw std::invalid_argument("Mpc2Config: weights must be >= 0");
        if (!(lower.f <= upper.f && lower.T <= upper.T && lower.DO <= upper.DO && lower.UIA <= upper.UIA))
            throw std::invalid_argument("Mpc2Config: lower bounds must not exceed upper bounds");
        if (!(UIA_d > 0.0)) throw std::invalid_argument("Mpc2Config: UIA_d must be positive");
        if (!(w0 < w_end)) throw std::invalid_argument("Mpc2Config: w0 must be below w_end");
    }
};

struct HorizonSolution {
    std::vector<EnvInput> inputs;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline double get(const EnvInput& u, std::size_t dim) {
    switch (dim) {
        case 0: return u.f;
        case 1: return u.T;
        case 2: return u.DO;
        default: return u.UIA;
    }
}

inline void set(EnvInput& u, std::size_t dim, double v) {
    switch (dim) {
        case 0: u.f = v; break;
        case 1: u.T = v; break;
        case 2: u.DO = v; break;
        default: u.UIA = v; break;
    }
}

inline void check_reference(std::span<const double> reference, std::size_t horizon) {
    if (reference.size() != horizon) throw std::invalid_argument("MPC: reference length must equal the horizon");
    for (double w : reference)
        if (!(w > 0.0)) throw std::invalid_argument("MPC: reference weights must be positive");
}

inline double state_violation_penalty(double w, double w0, double w_end, double weight) {
    double v = 0.0;
    if (w < w0) v = w0 - w;
    else if (w > w_end) v = w - w_end;
    return weight * v * v;
}

/**
 * Interval for coordinate `i` of a day-major decision vector with `dims`
 * inputs per day: the box, intersected with move limits against the
 * neighbouring days (and `previous` for day 0).
 */
struct MoveLimitedBox {
    std::vector<double> lo, hi;       // per dimension
    std::vector<double> max_move;     // per dimension; empty = no limit
    std::vector<double> previous;     // per dimension; empty = unknown
    std::size_t dims = 1;

    std::pair<double, double> operator()(std::size_t i, const std::vector<double>& x) const {
        const std::size_t d = i % dims;
        double a = lo[d], b = hi[d];
        if (!max_move.empty()) {
            const double delta = max_move[d];
            if (i >= dims) {
                a = std::max(a, x[i - dims] - delta);
                b = std::min(b, x[i - dims] + delta);
            } else if (!previous.empty()) {
                a = std::max(a, previous[d] - delta);
                b = std::min(b, previous[d] + delta);
            }
            if (i + dims < x.size()) {
                a = std::max(a, x[i + dims] - delta);
                b = std::min(b, x[i + dims] + delta);
            }
        }
        return {a, b};
    }

    /// Forward projection making a candidate sequence feasible.
    std::vector<double> project(std::vector<double> x) const {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const std::size_t d = i % dims;
            double a = lo[d], b = hi[d];
            if (!max_move.empty()) {
                const double ref = i >= dims ? x[i - dims] : (previous.empty() ? x[i] : previous[d]);
                a = std::max(a, ref - max_move[d]);
                b = std::min(b, ref + max_move[d]);
            }
            x[i] = std::clamp(x[i], a, std::max(a, b));
        }
        return x;
    }
};

template <class Objective>
HorizonSolution solve_multistart(Objective&& objective, const MoveLimitedBox& box,
                                 std::vector<std::vector<double>> starts, int descent_starts,
                                 const CoordinateSearchOptions& search, std::vector<double>& best_x) {
    struct Scored {
        std::vector<double> x;
        double value;
    };
    std::vector<Scored> scored;
    for (auto& s : starts) {
        auto x = box.project(std::move(s));
        bool duplicate = false;
        for (const auto& other : scored) duplicate = duplicate || other.x == x;
        if (duplicate) continue;
        const double v = objective(x);
        scored.push_back({std::move(x), v});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const Scored& l, const Scored& r) { return l.value < r.value; });

    HorizonSolution solution;
    best_x = scored.front().x;
    solution.objective = scored.front().value;
    const int runs = std::min<int>(std::max(1, descent_starts), static_cast<int>(scored.size()));
    for (int r = 0; r < runs; ++r) {
        auto res = coordinate_descent(objective, box, scored[r].x, search);
        solution.iterations += res.sweeps;
        // Descent from the best candidate never ends above it.
        if (r == 0 || res.value < solution.objective) {
            solution.objective = res.value;
            best_x = std::move(res.x);
            solution.converged = res.converged;
        }
    }
    return solution;
}

}  // namespace detail

/**
 * Single-shooting objective of the feed-only controller: the population is
 * simulated forward one day per feed and each day adds the squared relative
 * tracking error of the predicted mean weight plus lambda*f^2. Only T, DO and
 * UIA are read from `environment`.
 */
inline double mpc1_objective(std::span<const double> feeds, const PopulationState& current,
                             std::span<const double> reference, std::span<const EnvInput> environment,
                             const Mpc1Config& config, const ModelParams& params) {
    const std::size_t horizon = feeds.size();
    detail::check_reference(reference, horizon);
    if (environment.size() != horizon) throw std::invalid_argument("mpc1_objective: environment length mismatch");

    PopulationState state = current;
    double total = 0.0;
    for (std::size_t k = 0; k < horizon; ++k) {
        EnvInput u = environment[k];
        u.f = feeds[k];
        state = step_day(state, u, config.stocking, params, config.steps_per_day);
        const double w = state.mean_weight();
        const double e = (w - reference[k]) / reference[k];
        total += e * e + config.lambda * feeds[k] * feeds[k];
        total += detail::state_violation_penalty(w, config.w0, config.w_end, config.state_penalty);
    }
    return total;
}

/// Previous-step information used to warm-start and to build baseline candidates.
struct Mpc1History {
    std::vector<double> previous_solution;  ///< last horizon's feeds; shifted by one day before use
    std::optional<double> previous_feed;    ///< feed applied yesterday
};

/**
 * Receding-horizon feed optimization. Candidates are the shifted warm start,
 * all-f_min, all-f_max and hold-previous-feed; coordinate descent is run from
 * the best `descent_starts` of them. The returned objective never exceeds any
 * candidate's.
 */
inline HorizonSolution mpc1_solve(const PopulationState& current, std::span<const double> reference,
                                  std::span<const EnvInput> environment, const Mpc1Config& config,
                                  const ModelParams& params, const Mpc1History& history = {}) {
    config.validate();
    const auto horizon = static_cast<std::size_t>(config.horizon);
    detail::check_reference(reference, horizon);
    if (environment.size() != horizon) throw std::invalid_argument("mpc1_solve: environment length mismatch");

    detail::MoveLimitedBox box;
    box.dims = 1;
    box.lo = {config.f_min};
    box.hi = {config.f_max};
    if (config.max_feed_move) box.max_move = {*config.max_feed_move};
    if (history.previous_feed) box.previous = {*history.previous_feed};

    std::vector<std::vector<double>> starts;
    if (!history.previous_solution.empty()) {
        std::vector<double> warm(horizon, history.previous_solution.back());
        for (std::size_t k = 0; k + 1 < history.previous_solution.size() && k < horizon; ++k)
            warm[k] = history.previous_solution[k + 1];
        starts.push_back(std::move(warm));
    }
    starts.emplace_back(horizon, config.f_min);
    starts.emplace_back(horizon, config.f_max);
    if (history.previous_feed) starts.emplace_back(horizon, *history.previous_feed);

    auto objective = [&](const std::vector<double>& feeds) {
        return mpc1_objective(feeds, current, reference, environment, config, params);
    };
    std::vector<double> best;
    auto solution = detail::solve_multistart(objective, box, std::move(starts), config.descent_starts, config.search, best);
    solution.inputs.reserve(horizon);
    for (std::size_t k = 0; k < horizon; ++k) {
        EnvInput u = environment[k];
        u.f = best[k];
        solution.inputs.push_back(u);
    }
    return solution;
}

/**
 * Objective of the joint controller: tracking error plus lambda1*f^2,
 * lambda2*(T-T_d)^2, lambda3*(DO-DO_d)^2 and lambda4*((UIA-UIA_d)/UIA_d)^2,
 * summed over the horizon days.
 */
inline double mpc2_objective(std::span<const EnvInput> inputs, const PopulationState& current,
                             std::span<const double> reference, const Mpc2Config& config,
                             const ModelParams& params) {
    const std::size_t horizon = inputs.size();
    detail::check_reference(reference, horizon);
    if (!(config.UIA_d > 0.0)) throw std::invalid_argument("mpc2_objective: UIA_d must be positive");

    PopulationState state = current;
    double total = 0.0;
    for (std::size_t k = 0; k < horizon; ++k) {
        const EnvInput& u = inputs[k];
        state = step_day(state, u, config.stocking, params, config.steps_per_day);
        const double w = state.mean_weight();
        const double e = (w - reference[k]) / reference[k];
        const double dT = u.T - config.T_d;
        const double dDO = u.DO - config.DO_d;
        const double dU = (u.UIA - config.UIA_d) / config.UIA_d;
        total += e * e + config.lambda1 * u.f * u.f + config.lambda2 * dT * dT + config.lambda3 * dDO * dDO +
                 config.lambda4 * dU * dU;
        total += detail::state_violation_penalty(w, config.w0, config.w_end, config.state_penalty);
    }
    return total;
}

struct Mpc2History {
    std::vector<EnvInput> previous_solution;
    std::optional<EnvInput> previous_input;
};

/// Joint optimization of (f, T, DO, UIA) over the horizon; same candidate scheme as mpc1_solve.
inline HorizonSolution mpc2_solve(const PopulationState& current, std::span<const double> reference,
                                  const Mpc2Config& config, const ModelParams& params,
                                  const Mpc2History& history = {}) {
    config.validate();
    const auto horizon = static_cast<std::size_t>(config.horizon);
    detail::check_reference(reference, horizon);
    constexpr std::size_t dims = 4;

    detail::MoveLimitedBox box;
    box.dims = dims;
    for (std::size_t d = 0; d < dims; ++d) {
        box.lo.push_back(detail::get(config.lower, d));
        box.hi.push_back(detail::get(config.upper, d));
    }
    if (config.max_move)
        for (std::size_t d = 0; d < dims; ++d) box.max_move.push_back(detail::get(*config.max_move, d));
    if (history.previous_input)
        for (std::size_t d = 0; d < dims; ++d) box.previous.push_back(detail::get(*history.previous_input, d));

    auto flatten = [&](auto&& day_input) {
        std::vector<double> x(horizon * dims);
        for (std::size_t k = 0; k < horizon; ++k)
            for (std::size_t d = 0; d < dims; ++d) x[k * dims + d] = detail::get(day_input(k), d);
        return x;
    };
    const EnvInput at_reference{config.lower.f, config.T_d, config.DO_d, config.UIA_d};

    std::vector<std::vector<double>> starts;
    if (!history.previous_solution.empty()) {
        const auto& prev = history.previous_solution;
        starts.push_back(flatten([&](std::size_t k) { return k + 1 < prev.size() ? prev[k + 1] : prev.back(); }));
    }
    starts.push_back(flatten([&](std::size_t) { return config.lower; }));
    starts.push_back(flatten([&](std::size_t) { return config.upper; }));
    if (history.previous_input) starts.push_back(flatten([&](std::size_t) { return *history.previous_input; }));
    starts.push_back(flatten([&](std::size_t) { return at_reference; }));
    EnvInput full_feed = at_reference;
    full_feed.f = config.upper.f;
    starts.push_back(flatten([&](std::size_t) { return full_feed; }));

    std::vector<EnvInput> buffer(horizon);
    auto unflatten = [&](const std::vector<double>& x) -> std::span<const EnvInput> {
        for (std::size_t k = 0; k < horizon; ++k)
            for (std::size_t d = 0; d < dims; ++d) detail::set(buffer[k], d, x[k * dims + d]);
        return buffer;
    };
    auto objective = [&](const std::vector<double>& x) {
        return mpc2_objective(unflatten(x), current, reference, config, params);
    };
    std::vector<double> best;
    auto solution = detail::solve_multistart(objective, box, std::move(starts), config.descent_starts, config.search, best);
    const auto applied = unflatten(best);
    solution.inputs.assign(applied.begin(), applied.end());
    return solution;
}

}  // namespace aquafeed
