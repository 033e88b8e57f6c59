#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "aquafeed/model.hpp"

namespace aquafeed {

// Environmental response factors on food consumption. All three map into [0, 1].

inline double temperature_factor(double T, const ModelParams& params) {
    if (T > params.T_opt) {
        const double r = (T - params.T_opt) / (params.T_max - params.T_opt);
        return std::exp(-params.kappa * r * r * r * r);
    }
    if (T < params.T_opt) {
        const double r = (params.T_opt - T) / (params.T_opt - params.T_min);
        return std::exp(-params.kappa * r * r * r * r);
    }
    return 1.0;
}

inline double uia_factor(double UIA, const ModelParams& params) {
    if (UIA < params.UIA_crit) return 1.0;
    if (UIA < params.UIA_max) return (params.UIA_max - UIA) / (params.UIA_max - params.UIA_crit);
    return 0.0;
}

inline double do_factor(double DO, const ModelParams& params) {
    const double lower = params.do_lower();
    const double upper = params.do_upper();
    if (DO >= upper) return 1.0;
    if (DO > lower) return (DO - lower) / (upper - lower);
    return 0.0;
}

/// Daily mortality fraction. The logistic fit is expressed in percent.
inline double mortality_coefficient(double UIA, const ModelParams& params) {
    const double percent =
        params.mortality_Z / (1.0 + std::exp(-params.mortality_beta * (UIA - params.mortality_eta)));
    return percent / 100.0;
}

/// h*rho*f*b*(1-a)*tau(T)*sigma(DO). The anabolic gain is this times v(UIA).
inline double anabolism_coefficient(const EnvInput& env, const ModelParams& params) {
    return params.h * params.rho * env.f * params.b * (1.0 - params.a) *
           temperature_factor(env.T, params) * do_factor(env.DO, params);
}

inline double catabolism_coefficient(double T, const ModelParams& params) {
    return params.k_min * std::exp(params.j * (T - params.T_min));
}

/// Number of fish removed by the daily population update, INT(p*k1).
inline std::int64_t daily_deaths(std::int64_t p, double UIA, const ModelParams& params) {
    if (p <= 0) return 0;
    const auto deaths = static_cast<std::int64_t>(std::trunc(static_cast<double>(p) * mortality_coefficient(UIA, params)));
    return std::min(deaths, p);
}

/**
 * Right-hand side of the biomass equation,
 *   p_s*xi_i + Psi*v*xi^m - k(T)*xi^n - p*k1(UIA)*xi_a,
 * with the continuous mortality term exactly as written (xi_a = 0 when p = 0).
 */
inline double biomass_rhs(const PopulationState& state, const EnvInput& env, const StockingPolicy& stocking,
                          const ModelParams& params) {
    if (state.xi < 0.0) throw std::domain_error("biomass_rhs: negative biomass");
    const double anabolic = anabolism_coefficient(env, params) * uia_factor(env.UIA, params);
    const double catabolic = catabolism_coefficient(env.T, params);
    const double mortality = static_cast<double>(state.p) * mortality_coefficient(env.UIA, params) * state.mean_weight();
    return static_cast<double>(stocking.p_s) * stocking.xi_i + anabolic * std::pow(state.xi, params.m) -
           catabolic * std::pow(state.xi, params.n) - mortality;
}

/// Growth part of the biomass equation with coefficients frozen for one day.
struct DailyGrowth {
    double stocking = 0.0;  ///< g/day
    double anabolic = 0.0;  ///< Psi*v
    double catabolic = 0.0; ///< k(T)
    double m = 0.67;
    double n = 0.81;

    DailyGrowth(const EnvInput& env, const StockingPolicy& policy, const ModelParams& params)
        : stocking(static_cast<double>(policy.p_s) * policy.xi_i),
          anabolic(anabolism_coefficient(env, params) * uia_factor(env.UIA, params)),
          catabolic(catabolism_coefficient(env.T, params)),
          m(params.m),
          n(params.n) {}

    double operator()(double xi) const {
        if (xi <= 0.0) return stocking;
        const double log_xi = std::log(xi);  // one log shared by both powers
        return stocking + anabolic * std::exp(m * log_xi) - catabolic * std::exp(n * log_xi);
    }

    /// Classical RK4 over one day with `steps` equal substeps; biomass clamped at zero.
    double integrate(double xi, int steps) const {
        const double dt = 1.0 / steps;
        for (int s = 0; s < steps; ++s) {
            const double k1 = (*this)(xi);
            const double k2 = (*this)(xi + 0.5 * dt * k1);
            const double k3 = (*this)(xi + 0.5 * dt * k2);
            const double k4 = (*this)(xi + dt * k3);
            xi = std::max(0.0, xi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        }
        return xi;
    }
};

struct DayOutcome {
    PopulationState state;
    std::int64_t deaths = 0;
};

inline constexpr int default_steps_per_day = 24;

/**
 * Advance one day under zero-order-hold inputs.
 *
 * Biomass growth (stocking, anabolism, catabolism) is integrated with RK4.
 * Mortality is then realized once as INT(p*k1) whole fish, each removing the
 * current mean weight from the biomass.
 */
inline DayOutcome advance_day(PopulationState state, const EnvInput& env, const StockingPolicy& stocking,
                              const ModelParams& params, int steps_per_day = default_steps_per_day) {
    if (steps_per_day < 1) throw std::invalid_argument("advance_day: steps_per_day must be >= 1");
    if (state.xi < 0.0) throw std::domain_error("advance_day: negative biomass");
    if (state.p < 0) throw std::domain_error("advance_day: negative population");
    if (state.p == 0) state.xi = 0.0;

    DayOutcome out;
    out.state.t = state.t + 1;
    if (state.p == 0 && stocking.p_s == 0) return out;

    const double xi = DailyGrowth(env, stocking, params).integrate(state.xi, steps_per_day);
    const std::int64_t present = state.p + stocking.p_s;
    const double mean = present > 0 ? xi / static_cast<double>(present) : 0.0;

    out.deaths = daily_deaths(state.p, env.UIA, params);
    out.state.p = present - out.deaths;
    out.state.xi = std::max(0.0, xi - static_cast<double>(out.deaths) * mean);
    if (out.state.p <= 0) {
        out.state.p = 0;
        out.state.xi = 0.0;
    }
    return out;
}

inline PopulationState step_day(const PopulationState& state, const EnvInput& env, const StockingPolicy& stocking,
                                const ModelParams& params, int steps_per_day = default_steps_per_day) {
    return advance_day(state, env, stocking, params, steps_per_day).state;
}

}  // namespace aquafeed
