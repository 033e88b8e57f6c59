#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aquafeed/growth.hpp"
#include "aquafeed/model.hpp"

namespace aquafeed {

/// Decimal form used for CSV numbers; `digits` = 17 round-trips a double.
inline std::string format_number(double value, int digits = 10) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return buf;
}

/**
 * Day-by-day record of a run.
 *
 * states[d] is the population at the start of day d (states[0] is the
 * initial condition); inputs[d] and deaths[d] belong to day d, i.e. the
 * transition states[d] -> states[d+1]. cumulative_food_g[d] is the food
 * delivered before day d starts, so it has one entry per state.
 */
struct ScenarioTrace {
    std::vector<PopulationState> states;
    std::vector<EnvInput> inputs;
    std::vector<std::int64_t> deaths;
    std::vector<double> cumulative_food_g;
    double R_fraction = 0.10;

    explicit ScenarioTrace(const PopulationState& initial, double ration_fraction = 0.10)
        : states{initial}, cumulative_food_g{0.0}, R_fraction(ration_fraction) {}

    std::size_t days() const { return inputs.size(); }
    const PopulationState& current() const { return states.back(); }

    void record(const EnvInput& input, const DayOutcome& outcome) {
        const double ration = input.f * R_fraction * states.back().xi;
        inputs.push_back(input);
        deaths.push_back(outcome.deaths);
        states.push_back(outcome.state);
        cumulative_food_g.push_back(cumulative_food_g.back() + ration);
    }

    std::vector<double> mean_weights() const {
        std::vector<double> out;
        out.reserve(states.size());
        for (const auto& s : states) out.push_back(s.mean_weight());
        return out;
    }

    std::int64_t total_deaths() const {
        std::int64_t total = 0;
        for (auto d : deaths) total += d;
        return total;
    }
};

/// Open-loop run over a fixed input series.
inline ScenarioTrace simulate(const PopulationState& initial, std::span<const EnvInput> inputs,
                              const StockingPolicy& stocking, const ModelParams& params,
                              int steps_per_day = default_steps_per_day) {
    params.validate();
    stocking.validate();
    ScenarioTrace trace(initial, params.R_fraction);
    for (const auto& input : inputs) {
        input.validate();
        trace.record(input, advance_day(trace.current(), input, stocking, params, steps_per_day));
    }
    return trace;
}

/// Sum over days of f_d * R * xi_d, using the biomass at the start of each day.
inline double food_consumption_g(const ScenarioTrace& trace) {
    double total = 0.0;
    for (std::size_t d = 0; d < trace.inputs.size(); ++d)
        total += trace.inputs[d].f * trace.R_fraction * trace.states[d].xi;
    return total;
}

/**
 * CSV with one row per state. Row d carries the state at day d together with
 * the inputs, factor values and deaths of day d; the final row (end of the
 * run) leaves those columns empty.
 */
inline void write_trace_csv(std::ostream& os, const ScenarioTrace& trace, const ModelParams& params) {
    os << "day,xi_g,p,mean_w_g,f,T,DO,UIA,tau,sigma,v,k1,deaths,cum_food_g\n";
    for (std::size_t d = 0; d < trace.states.size(); ++d) {
        const auto& s = trace.states[d];
        os << s.t << ',' << format_number(s.xi) << ',' << s.p << ',' << format_number(s.mean_weight()) << ',';
        if (d < trace.inputs.size()) {
            const auto& u = trace.inputs[d];
            os << format_number(u.f) << ',' << format_number(u.T) << ',' << format_number(u.DO) << ','
               << format_number(u.UIA) << ',' << format_number(temperature_factor(u.T, params)) << ','
               << format_number(do_factor(u.DO, params)) << ',' << format_number(uia_factor(u.UIA, params)) << ','
               << format_number(mortality_coefficient(u.UIA, params)) << ',' << trace.deaths[d] << ',';
        } else {
            os << ",,,,,,,,,";
        }
        os << format_number(trace.cumulative_food_g[d]) << '\n';
    }
}

}  // namespace aquafeed
