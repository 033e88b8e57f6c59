#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace aquafeed {

/**
 * Biological and environmental constants of the population growth model.
 *
 * Weights are in grams throughout. The DO ramp bounds are kept exactly as
 * tabulated (DO_crit = 0.3, DO_min = 1.0); the ramp itself always runs from
 * the smaller to the larger of the two, see do_lower()/do_upper().
 */
struct ModelParams {
    double m = 0.67;        ///< body-weight exponent of net anabolism
    double n = 0.81;        ///< body-weight exponent of fasting catabolism
    double b = 0.62;        ///< efficiency of food assimilation
    double a = 0.53;        ///< fraction of the food assimilated
    double h = 0.8;         ///< food consumption coefficient [g^(1-m)/day]
    double rho = 1.0;       ///< photoperiod factor, (0, 2)
    double k_min = 0.00133; ///< fasting catabolism coefficient [g^(1-n)/day]
    double j = 0.0132;      ///< catabolism temperature coefficient [1/degC]

    double T_opt = 33.0;
    double T_min = 24.0;
    double T_max = 40.0;
    double kappa = 4.6;

    double UIA_crit = 0.06; ///< mg/L
    double UIA_max = 1.4;   ///< mg/L
    double DO_crit = 0.3;   ///< mg/L
    double DO_min = 1.0;    ///< mg/L

    double mortality_Z = 99.41;    ///< logistic asymptote, percent
    double mortality_beta = 10.36; ///< L/mg
    double mortality_eta = 0.80;   ///< mg/L

    double R_fraction = 0.10; ///< maximal daily ration, fraction of body weight

    double do_lower() const { return std::min(DO_crit, DO_min); }
    double do_upper() const { return std::max(DO_crit, DO_min); }

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const {
        auto require = [](bool ok, const char* what) {
            if (!ok) throw std::invalid_argument(std::string("ModelParams: ") + what);
        };
        require(m > 0.0 && m < 1.0, "m must lie in (0, 1)");
        require(n > 0.0 && n < 1.0, "n must lie in (0, 1)");
        require(b > 0.0 && a > 0.0 && a < 1.0 && h > 0.0, "b, h must be positive and a in (0, 1)");
        require(rho > 0.0 && rho < 2.0, "rho must lie in (0, 2)");
        require(k_min > 0.0 && j > 0.0, "k_min and j must be positive");
        require(T_min < T_opt && T_opt < T_max, "T_min < T_opt < T_max required");
        require(kappa > 0.0, "kappa must be positive");
        require(UIA_crit > 0.0 && UIA_crit < UIA_max, "0 < UIA_crit < UIA_max required");
        require(DO_crit > 0.0 && DO_min > 0.0 && do_lower() < do_upper(),
                "DO bounds must be positive and distinct");
        require(mortality_Z > 0.0 && mortality_Z <= 100.0, "mortality_Z must lie in (0, 100]");
        require(mortality_beta > 0.0 && mortality_eta > 0.0, "mortality_beta and mortality_eta must be positive");
        require(R_fraction > 0.0, "R_fraction must be positive");
    }
};

/// Input vector applied over one day: relative feed, temperature, DO, UIA.
struct EnvInput {
    double f = 1.0;
    double T = 33.0;
    double DO = 5.0;
    double UIA = 0.0;

    void validate() const {
        if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("EnvInput: f must lie in [0, 1]");
        if (!(T >= 0.0 && DO >= 0.0 && UIA >= 0.0))
            throw std::invalid_argument("EnvInput: T, DO and UIA must be non-negative");
    }
};

struct PopulationState {
    double xi = 0.0;    ///< total biomass [g]
    std::int64_t p = 0; ///< fish count
    int t = 0;          ///< simulation day

    /// Mean fish weight; zero for an empty pond.
    double mean_weight() const { return p > 0 ? xi / static_cast<double>(p) : 0.0; }
};

/// Constant stocking: p_s fish per day, each weighing xi_i grams.
struct StockingPolicy {
    std::int64_t p_s = 0;
    double xi_i = 6.24;

    void validate() const {
        if (p_s < 0) throw std::invalid_argument("StockingPolicy: p_s must be non-negative");
        if (!(xi_i > 0.0)) throw std::invalid_argument("StockingPolicy: xi_i must be positive");
    }
};

inline PopulationState make_population(std::int64_t count, double individual_weight_g) {
    if (count < 0) throw std::invalid_argument("population count must be non-negative");
    if (!(individual_weight_g > 0.0)) throw std::invalid_argument("individual weight must be positive");
    return {static_cast<double>(count) * individual_weight_g, count, 0};
}

}  // namespace aquafeed
