#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aquafeed/controllers.hpp"
#include "aquafeed/growth.hpp"
#include "aquafeed/model.hpp"
#include "aquafeed/mpc.hpp"
#include "aquafeed/qlearning.hpp"
#include "aquafeed/trace.hpp"

namespace aquafeed {

/// Per-day input series over a culture period.
struct Profile {
    std::vector<double> f, T, DO, UIA;

    std::size_t size() const { return UIA.size(); }
    EnvInput at(std::size_t day) const { return {f.at(day), T.at(day), DO.at(day), UIA.at(day)}; }

    std::vector<EnvInput> inputs(std::size_t first = 0, std::size_t count = std::size_t(-1)) const {
        std::vector<EnvInput> out;
        const std::size_t last = std::min(size(), count == std::size_t(-1) ? size() : first + count);
        for (std::size_t d = first; d < last; ++d) out.push_back(at(d));
        return out;
    }
};

/**
 * Shapes of the three ammonia exposure cases. Temperature swings gently
 * around its set point and DO stays above the oxygen ramp; UIA is constant
 * (case 1), a sinusoid below the critical limit (case 2), or that sinusoid
 * plus one Gaussian spike (case 3). A custom UIA series replaces all three.
 */
struct CaseSettings {
    double temperature = 29.7;      ///< set point the pond temperature is controlled around [degC]
    double temperature_amplitude = 2.0;
    double temperature_period_days = 20.0;
    double dissolved_oxygen = 5.0;  ///< above the DO ramp, so sigma = 1
    double feed = 1.0;              ///< placeholder feed; controllers overwrite it
    double uia_level = 0.03;        ///< half the critical limit
    double uia_amplitude = 0.025;
    double uia_period_days = 30.0;
    double spike_peak = 0.62;       ///< added on top of the sinusoid
    double spike_fwhm_days = 3.0;
    double spike_day = 75.0;
    std::optional<std::vector<double>> uia_override;  ///< custom UIA series, held at its last value when short
};

inline Profile build_case_profiles(int case_id, int period, const CaseSettings& settings = {}) {
    if (case_id < 1 || case_id > 3) throw std::invalid_argument("build_case_profiles: case id must be 1, 2 or 3");
    if (period < 1) throw std::invalid_argument("build_case_profiles: period must be >= 1");
    Profile p;
    const auto n = static_cast<std::size_t>(period);
    p.f.assign(n, settings.feed);
    p.T.assign(n, settings.temperature);
    p.DO.assign(n, settings.dissolved_oxygen);
    p.UIA.assign(n, settings.uia_level);
    for (std::size_t d = 0; d < n; ++d)
        p.T[d] += settings.temperature_amplitude *
                  std::sin(2.0 * std::numbers::pi * static_cast<double>(d) / settings.temperature_period_days);
    if (settings.uia_override) {
        const auto& u = *settings.uia_override;
        if (u.empty()) throw std::invalid_argument("build_case_profiles: empty UIA series");
        for (std::size_t d = 0; d < n; ++d) p.UIA[d] = u[std::min(d, u.size() - 1)];
        return p;
    }
    if (case_id == 1) return p;

    const double sigma = settings.spike_fwhm_days / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    for (std::size_t d = 0; d < n; ++d) {
        const double t = static_cast<double>(d);
        p.UIA[d] = settings.uia_level + settings.uia_amplitude * std::sin(2.0 * std::numbers::pi * t / settings.uia_period_days);
        if (case_id == 3) {
            const double z = (t - settings.spike_day) / sigma;
            p.UIA[d] += settings.spike_peak * std::exp(-0.5 * z * z);
        }
    }
    return p;
}

/// Desired mean-weight trajectory, one value per day including day 0.
struct ReferenceTrajectory {
    enum class Source { model, csv };
    std::vector<double> weight_g;
    Source source = Source::model;
};

/**
 * The model-generated reference is a single fish following the individual
 * growth model under a constant relative feed and optimal water quality.
 */
struct ReferenceSettings {
    double initial_weight = 6.24;
    double feed = 0.36;
};

/// Single-fish growth (no mortality) under a daily input series; one weight per day including day 0.
inline std::vector<double> simulate_individual(double initial_weight, std::span<const EnvInput> inputs,
                                               const ModelParams& params, int steps_per_day = default_steps_per_day) {
    std::vector<double> w{initial_weight};
    w.reserve(inputs.size() + 1);
    for (const auto& u : inputs) w.push_back(DailyGrowth(u, StockingPolicy{}, params).integrate(w.back(), steps_per_day));
    return w;
}

inline ReferenceTrajectory build_reference(int period, const ModelParams& params, const ReferenceSettings& settings = {},
                                           int steps_per_day = default_steps_per_day) {
    if (period < 1) throw std::invalid_argument("build_reference: period must be >= 1");
    const EnvInput optimal{settings.feed, params.T_opt, params.do_upper() + 1.0, 0.0};
    const std::vector<EnvInput> inputs(static_cast<std::size_t>(period), optimal);
    return {simulate_individual(settings.initial_weight, inputs, params, steps_per_day), ReferenceTrajectory::Source::model};
}

/// Smooth, non-toxic input series for checking the population model against the individual one.
inline std::vector<EnvInput> validation_inputs(int period, const ModelParams& params) {
    std::vector<EnvInput> inputs;
    for (int d = 0; d < period; ++d) {
        const double t = static_cast<double>(d);
        inputs.push_back({0.7 + 0.3 * std::sin(2.0 * std::numbers::pi * t / 40.0),
                          params.T_opt - 3.0 + 3.0 * std::cos(2.0 * std::numbers::pi * t / 60.0),
                          params.do_upper() + 4.0, 0.5 * params.UIA_crit});
    }
    return inputs;
}

/**
 * Reads "day,value" rows (header optional). Days must start at 0 and be
 * consecutive; values must be positive unless `require_positive` is false,
 * in which case zero is accepted too.
 */
inline std::vector<double> load_series_csv(std::istream& is, const std::string& what, bool require_positive = true) {
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && !(std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-')) continue;
        std::istringstream row(line);
        long day = 0;
        char comma = 0;
        double value = 0.0;
        if (!(row >> day >> comma >> value) || comma != ',')
            throw std::runtime_error(what + ": malformed row at line " + std::to_string(line_no));
        if (day != static_cast<long>(values.size()))
            throw std::runtime_error(what + ": days must be consecutive from 0 (line " + std::to_string(line_no) + ")");
        if (require_positive ? !(value > 0.0) : !(value >= 0.0))
            throw std::runtime_error(what + ": value out of range at line " + std::to_string(line_no));
        values.push_back(value);
    }
    if (values.empty()) throw std::runtime_error(what + ": no rows");
    return values;
}

inline ReferenceTrajectory load_reference_csv(std::istream& is) {
    return {load_series_csv(is, "reference CSV"), ReferenceTrajectory::Source::csv};
}

/// 100 * sqrt(mean(((w - w_d)/w_d)^2)).
inline double rmse_percent(std::span<const double> mean_weights, std::span<const double> reference) {
    if (mean_weights.size() != reference.size() || reference.empty())
        throw std::invalid_argument("rmse_percent: series must be nonempty and of equal length");
    double sum = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        if (!(reference[i] != 0.0)) throw std::invalid_argument("rmse_percent: zero reference value");
        const double e = (mean_weights[i] - reference[i]) / reference[i];
        sum += e * e;
    }
    return 100.0 * std::sqrt(sum / static_cast<double>(reference.size()));
}

inline double rmse_percent(const ScenarioTrace& trace, std::span<const double> reference) {
    const auto w = trace.mean_weights();
    return rmse_percent(std::span<const double>(w), reference);
}

enum class ControllerKind { bangbang, pid, mpc1, mpc2, qlearning };

inline std::string_view to_string(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::bangbang: return "bang-bang";
        case ControllerKind::pid: return "PID";
        case ControllerKind::mpc1: return "MPC1";
        case ControllerKind::mpc2: return "MPC2";
        case ControllerKind::qlearning: return "Q-learning";
    }
    return "?";
}

/// Everything a controller comparison run needs.
struct ScenarioConfig {
    ModelParams params{};
    int period = 150;
    double initial_weight = 6.24;
    int steps_per_day = default_steps_per_day;
    CaseSettings cases{};
    ReferenceSettings reference{};
    std::optional<std::vector<double>> reference_override;  ///< e.g. loaded from CSV
    double w_end_factor = 1.2;  ///< MPC upper weight bound relative to the final reference weight
    PidGains pid{};
    Mpc1Config mpc1{};
    Mpc2Config mpc2{};
    QConfig q{};
    std::uint64_t seed = 42;

    void validate() const {
        params.validate();
        pid.validate();
        mpc1.validate();
        mpc2.validate();
        q.validate();
        if (period < 1) throw std::invalid_argument("ScenarioConfig: period must be >= 1");
        if (!(initial_weight > 0.0)) throw std::invalid_argument("ScenarioConfig: initial_weight must be positive");
        if (steps_per_day < 1) throw std::invalid_argument("ScenarioConfig: steps_per_day must be >= 1");
        if (!(w_end_factor > 0.0)) throw std::invalid_argument("ScenarioConfig: w_end_factor must be positive");
    }

    /// Days of reference/profile needed beyond the culture period for the longest prediction horizon.
    int lookahead() const { return std::max(mpc1.horizon, mpc2.horizon) + 1; }

    /// Reference covering period + lookahead days; a CSV reference is held at its last value.
    std::vector<double> extended_reference() const {
        const auto needed = static_cast<std::size_t>(period + lookahead()) + 1;
        std::vector<double> w;
        if (reference_override) {
            w = *reference_override;
            if (w.size() < static_cast<std::size_t>(period) + 1)
                throw std::invalid_argument("reference shorter than the culture period");
            w.resize(std::max(w.size(), needed), w.back());
        } else {
            w = build_reference(period + lookahead(), params, reference, steps_per_day).weight_g;
        }
        return w;
    }
};

struct ScenarioResult {
    ControllerKind controller = ControllerKind::bangbang;
    int case_id = 1;
    std::int64_t initial_population = 0;
    ScenarioTrace trace{PopulationState{}};
    std::vector<double> reference;  ///< the period + 1 values the run was scored against
    double rmse_percent = 0.0;
    double food_consumption_g = 0.0;
    std::int64_t deaths = 0;
    std::int64_t final_population = 0;
    double final_total_weight_g = 0.0;
};

/// Derived per-run seed so every (case, population) training run is independent but reproducible.
inline std::uint64_t derive_seed(std::uint64_t seed, int case_id, std::int64_t population) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(case_id * 1000 + population);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Q-learning on the case's exposure profile, starting from `population` fish of the initial weight.
inline TrainResult train_for_case(int case_id, std::int64_t population, const ScenarioConfig& config) {
    config.validate();
    const auto reference = config.extended_reference();
    const Profile profile = build_case_profiles(case_id, config.period, config.cases);
    GrowthEnvironment env(config.params, make_population(population, config.initial_weight), reference,
                          profile.inputs(), config.q, config.steps_per_day);
    return train(env, config.q, derive_seed(config.seed, case_id, population));
}

/**
 * Closed-loop daily run: observe the mean weight, choose the day's inputs,
 * step the population model. Only MPC2 changes T, DO and UIA; every other
 * controller sets the feed and inherits the case profile.
 */
inline ScenarioResult run_scenario(ControllerKind controller, int case_id, std::int64_t population,
                                   const ScenarioConfig& config, const QTable* q_table = nullptr) {
    config.validate();
    if (controller == ControllerKind::qlearning) {
        if (q_table == nullptr) throw std::invalid_argument("run_scenario: Q-learning needs a trained table");
        if (q_table->states() != config.q.grid.size() || q_table->actions() != config.q.actions.size())
            throw std::invalid_argument("run_scenario: Q-table shape does not match the Q configuration");
    }
    const auto& params = config.params;
    const auto reference = config.extended_reference();
    const Profile profile = build_case_profiles(case_id, config.period + config.lookahead(), config.cases);
    const double w_end = config.w_end_factor * reference[static_cast<std::size_t>(config.period)];

    // An unset (infinite) upper weight bound defaults to a margin over the final reference weight.
    Mpc1Config mpc1 = config.mpc1;
    if (!std::isfinite(mpc1.w_end)) mpc1.w_end = std::max(w_end, mpc1.w0 * 1.0001);
    Mpc2Config mpc2 = config.mpc2;
    if (!std::isfinite(mpc2.w_end)) mpc2.w_end = std::max(w_end, mpc2.w0 * 1.0001);

    ScenarioResult result;
    result.controller = controller;
    result.case_id = case_id;
    result.initial_population = population;
    result.trace = ScenarioTrace(make_population(population, config.initial_weight), params.R_fraction);

    PidState pid_state;
    Mpc1History mpc1_history;
    Mpc2History mpc2_history;

    for (int day = 0; day < config.period; ++day) {
        const auto d = static_cast<std::size_t>(day);
        const PopulationState& now = result.trace.current();
        const double w = now.mean_weight();
        EnvInput u = profile.at(d);

        switch (controller) {
            case ControllerKind::bangbang:
                u.f = bangbang_feed(w, reference[d]);
                break;
            case ControllerKind::pid: {
                const auto out = pid_feed(w, reference[d], pid_state, config.pid);
                pid_state = out.state;
                u.f = out.feed;
                break;
            }
            case ControllerKind::mpc1: {
                const auto N = static_cast<std::size_t>(mpc1.horizon);
                const auto env = profile.inputs(d, N);
                const auto sol = mpc1_solve(now, std::span<const double>(reference).subspan(d + 1, N), env, mpc1,
                                            params, mpc1_history);
                mpc1_history.previous_solution.clear();
                for (const auto& x : sol.inputs) mpc1_history.previous_solution.push_back(x.f);
                u.f = sol.inputs.front().f;
                mpc1_history.previous_feed = u.f;
                break;
            }
            case ControllerKind::mpc2: {
                const auto N = static_cast<std::size_t>(mpc2.horizon);
                const auto sol = mpc2_solve(now, std::span<const double>(reference).subspan(d + 1, N), mpc2, params,
                                            mpc2_history);
                mpc2_history.previous_solution = sol.inputs;
                u = sol.inputs.front();
                mpc2_history.previous_input = u;
                break;
            }
            case ControllerKind::qlearning: {
                const std::size_t s = discretize_state(w, reference[d], config.q.grid);
                u.f = config.q.actions.at(greedy_action(*q_table, s));
                break;
            }
        }
        result.trace.record(u, advance_day(now, u, StockingPolicy{}, params, config.steps_per_day));
    }

    result.reference.assign(reference.begin(), reference.begin() + config.period + 1);
    result.rmse_percent = rmse_percent(result.trace, result.reference);
    result.food_consumption_g = food_consumption_g(result.trace);
    result.deaths = result.trace.total_deaths();
    result.final_population = result.trace.current().p;
    result.final_total_weight_g = result.trace.current().xi;
    return result;
}

struct SensitivityRow {
    std::string name;
    double final_weight_g = 0.0;
    std::int64_t survivors = 0;
    std::int64_t initial = 0;
    ScenarioTrace trace{PopulationState{}};
};

struct SensitivitySettings {
    int period = 150;
    std::int64_t population = 10;
    double initial_weight = 6.24;
    double cycle_days = 50.0;  ///< oscillation period of every time-varying profile
    double dissolved_oxygen = 5.0;
};

/**
 * Baseline (all factors at 1, full feed) against four runs in which exactly
 * one input oscillates so that its factor sweeps the whole [0, 1] range.
 */
inline std::vector<SensitivityRow> sensitivity_study(const ModelParams& params, const SensitivitySettings& s = {},
                                                     int steps_per_day = default_steps_per_day) {
    params.validate();
    const auto n = static_cast<std::size_t>(s.period);
    const EnvInput best{1.0, params.T_opt, s.dissolved_oxygen, 0.0};
    auto wave = [&](std::size_t d) { return 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(d) / s.cycle_days); };

    std::vector<std::pair<std::string, std::vector<EnvInput>>> cases;
    cases.emplace_back("Maximum case", std::vector<EnvInput>(n, best));
    std::vector<EnvInput> vf(n, best), vT(n, best), vDO(n, best), vU(n, best);
    for (std::size_t d = 0; d < n; ++d) {
        vf[d].f = 1.0 - 0.9 * wave(d);
        vT[d].T = params.T_opt + (d % static_cast<std::size_t>(s.cycle_days) < s.cycle_days / 2.0
                                      ? (params.T_max - params.T_opt) * wave(d)
                                      : -(params.T_opt - params.T_min) * wave(d));
        vDO[d].DO = params.do_upper() - (params.do_upper() - params.do_lower()) * wave(d);
        vU[d].UIA = params.UIA_max * wave(d);
    }
    cases.emplace_back("Time-varying f", std::move(vf));
    cases.emplace_back("Time-varying T", std::move(vT));
    cases.emplace_back("Time-varying DO", std::move(vDO));
    cases.emplace_back("Time-varying UIA", std::move(vU));

    std::vector<SensitivityRow> rows;
    for (auto& [name, inputs] : cases) {
        SensitivityRow row;
        row.name = name;
        row.initial = s.population;
        row.trace = simulate(make_population(s.population, s.initial_weight), inputs, StockingPolicy{}, params,
                             steps_per_day);
        row.final_weight_g = row.trace.current().xi;
        row.survivors = row.trace.current().p;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace aquafeed
