#pragma once

#include <algorithm>
#include <stdexcept>

namespace aquafeed {

/// On-off feeding: full ration while the fish are below the desired weight.
inline double bangbang_feed(double mean_weight, double desired_weight) {
    if (!(desired_weight > 0.0)) throw std::invalid_argument("bangbang_feed: desired weight must be positive");
    return desired_weight - mean_weight > 0.0 ? 1.0 : 0.1;
}

struct PidGains {
    double kp = 0.1;
    double ki = 12.0;
    double kd = 0.01;
    double f_min = 0.1;
    double f_max = 1.0;

    void validate() const {
        if (!(f_min < f_max)) throw std::invalid_argument("PidGains: f_min must be below f_max");
    }
};

struct PidState {
    double integral = 0.0; ///< error * day
    double previous_error = 0.0;
    bool initialized = false;
};

struct PidOutput {
    double feed;
    PidState state;
};

/**
 * Discrete PID on the weight error e = w_d - w (grams): rectangle-rule
 * integral, backward-difference derivative (zero on the first call), output
 * clamped to [f_min, f_max]. The integral is only committed when the output
 * is not saturated.
 */
inline PidOutput pid_feed(double mean_weight, double desired_weight, const PidState& state, const PidGains& gains,
                          double dt = 1.0) {
    if (!(dt > 0.0)) throw std::invalid_argument("pid_feed: dt must be positive");
    gains.validate();
    const double error = desired_weight - mean_weight;
    const double derivative = state.initialized ? (error - state.previous_error) / dt : 0.0;
    const double candidate = state.integral + error * dt;
    const double raw = gains.kp * error + gains.ki * candidate + gains.kd * derivative;
    const double feed = std::clamp(raw, gains.f_min, gains.f_max);

    PidState next = state;
    next.previous_error = error;
    next.initialized = true;
    if (raw == feed) next.integral = candidate;
    return {feed, next};
}

}  // namespace aquafeed
