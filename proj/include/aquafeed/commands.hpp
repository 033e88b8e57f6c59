#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <string>
#include <vector>

#include "aquafeed/config.hpp"
#include "aquafeed/scenarios.hpp"

namespace aquafeed {

namespace fs = std::filesystem;

/// Column-aligned plain-text table; the first row is the header.
inline void print_table(std::ostream& os, const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty()) return;
    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            os << r[c];
            if (c + 1 < r.size()) os << std::string(width[c] - r[c].size() + 2, ' ');
        }
        os << '\n';
    };
    line(rows.front());
    std::size_t total = 0;
    for (auto w : width) total += w + 2;
    os << std::string(total > 2 ? total - 2 : 0, '-') << '\n';
    for (std::size_t i = 1; i < rows.size(); ++i) line(rows[i]);
}

inline std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

inline std::string slug(std::string_view name) {
    std::string s;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else if (!s.empty() && s.back() != '_') s += '_';
    }
    while (!s.empty() && s.back() == '_') s.pop_back();
    return s;
}

// ---------------------------------------------------------------------------
// validate

struct ValidationRow {
    std::int64_t population;
    double final_total_weight_g;
    std::int64_t final_population;
    double expected_total_weight_g;  ///< population times the individual endpoint
    double relative_error;
};

inline std::vector<ValidationRow> run_validation(const ExperimentConfig& cfg, const fs::path* out = nullptr) {
    const auto& sc = cfg.scenario;
    const auto inputs = validation_inputs(cfg.validation.period, sc.params);
    const auto individual = simulate_individual(sc.initial_weight, inputs, sc.params, sc.steps_per_day);
    if (out) {
        auto f = open_output(*out / "validation_individual.csv");
        f << "day,w_g\n";
        for (std::size_t d = 0; d < individual.size(); ++d) f << d << ',' << format_number(individual[d]) << '\n';
    }
    std::vector<ValidationRow> rows;
    for (auto p : cfg.validation.populations) {
        const auto trace = simulate(make_population(p, sc.initial_weight), inputs, StockingPolicy{}, sc.params,
                                    sc.steps_per_day);
        if (out) {
            auto f = open_output(*out / ("validation_p" + std::to_string(p) + ".csv"));
            write_trace_csv(f, trace, sc.params);
        }
        const double expected = static_cast<double>(p) * individual.back();
        rows.push_back({p, trace.current().xi, trace.current().p, expected,
                        std::abs(trace.current().xi - expected) / expected});
    }
    return rows;
}

/// Exit status 0 iff the single-fish run matches the individual model within tolerance.
inline int cmd_validate(const ExperimentConfig& cfg, const fs::path& out, std::ostream& os) {
    const auto rows = run_validation(cfg, &out);
    auto csv = open_output(out / "validation_summary.csv");
    csv << "population,final_total_weight_g,final_population,expected_total_weight_g,relative_error\n";
    std::vector<std::vector<std::string>> table{{"population", "final total [g]", "survivors", "p x individual [g]", "rel. difference"}};
    bool ok = true;
    bool have_single = false;
    for (const auto& r : rows) {
        csv << r.population << ',' << format_number(r.final_total_weight_g) << ',' << r.final_population << ','
            << format_number(r.expected_total_weight_g) << ',' << format_number(r.relative_error) << '\n';
        table.push_back({std::to_string(r.population), fixed(r.final_total_weight_g, 2), std::to_string(r.final_population),
                         fixed(r.expected_total_weight_g, 2), format_number(r.relative_error, 3)});
        if (r.population == 1) {
            have_single = true;
            ok = ok && r.relative_error < cfg.validation.tolerance;
        }
    }
    print_table(os, table);
    if (!have_single) {
        os << "validation: population 1 is not in the run list\n";
        return 1;
    }
    os << (ok ? "validation passed" : "validation FAILED") << ": single-fish endpoint error vs individual model "
       << (ok ? "<" : ">=") << ' ' << cfg.validation.tolerance << '\n';
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// sensitivity

inline int cmd_sensitivity(const ExperimentConfig& cfg, const fs::path& out, std::ostream& os) {
    const auto rows = sensitivity_study(cfg.scenario.params, cfg.sensitivity, cfg.scenario.steps_per_day);
    auto csv = open_output(out / "sensitivity.csv");
    csv << "case,final_total_weight_g,survivors,initial_population\n";
    std::vector<std::vector<std::string>> table{{"case", "final total [g]", "survivors"}};
    for (const auto& r : rows) {
        csv << r.name << ',' << format_number(r.final_weight_g) << ',' << r.survivors << ',' << r.initial << '\n';
        table.push_back({r.name, fixed(r.final_weight_g, 1), std::to_string(r.survivors) + "/" + std::to_string(r.initial)});
        auto f = open_output(out / ("sensitivity_" + slug(r.name) + ".csv"));
        write_trace_csv(f, r.trace, cfg.scenario.params);
    }
    print_table(os, table);
    return 0;
}

// ---------------------------------------------------------------------------
// compare / mpc2

struct RunSpec {
    ControllerKind controller;
    int case_id;
    std::int64_t population;
};

/// One closed-loop run; Q-learning trains its own table first.
inline ScenarioResult execute(const RunSpec& spec, const ScenarioConfig& config) {
    if (spec.controller != ControllerKind::qlearning)
        return run_scenario(spec.controller, spec.case_id, spec.population, config);
    const auto trained = train_for_case(spec.case_id, spec.population, config);
    return run_scenario(spec.controller, spec.case_id, spec.population, config, &trained.table);
}

inline std::vector<ScenarioResult> execute_all(const std::vector<RunSpec>& specs, const ScenarioConfig& config,
                                               bool parallel) {
    std::vector<ScenarioResult> results;
    if (!parallel) {
        for (const auto& s : specs) results.push_back(execute(s, config));
        return results;
    }
    std::vector<std::future<ScenarioResult>> pending;
    for (const auto& s : specs) pending.push_back(std::async(std::launch::async, [s, &config] { return execute(s, config); }));
    for (auto& f : pending) results.push_back(f.get());
    return results;
}

inline std::string mortality_label(const ScenarioResult& r) {
    return std::to_string(r.deaths) + "/" + std::to_string(r.initial_population);
}

inline void write_results(const std::vector<ScenarioResult>& results, const ScenarioConfig& config, const fs::path& out,
                          const std::string& summary_name, std::ostream& os) {
    auto csv = open_output(out / summary_name);
    csv << "case,population,controller,mortality,deaths,rmse_percent,food_g,final_population,final_total_weight_g\n";
    std::vector<std::vector<std::string>> table{{"case", "controller", "mortality", "RMSE [%]", "food [g]"}};
    for (const auto& r : results) {
        const std::string name(to_string(r.controller));
        csv << r.case_id << ',' << r.initial_population << ',' << name << ',' << mortality_label(r) << ',' << r.deaths << ','
            << format_number(r.rmse_percent) << ',' << format_number(r.food_consumption_g) << ',' << r.final_population << ','
            << format_number(r.final_total_weight_g) << '\n';
        table.push_back({std::to_string(r.case_id), name, mortality_label(r), fixed(r.rmse_percent, 3),
                         fixed(r.food_consumption_g, 1)});
        auto f = open_output(out / ("trace_case" + std::to_string(r.case_id) + "_p" + std::to_string(r.initial_population) +
                                    "_" + slug(name) + ".csv"));
        write_trace_csv(f, r.trace, config.params);
    }
    print_table(os, table);
}

inline std::vector<RunSpec> compare_runs(const CompareSettings& s, const Mpc2StudySettings& mpc2) {
    const ControllerKind controllers[] = {ControllerKind::bangbang, ControllerKind::pid, ControllerKind::mpc1,
                                     ControllerKind::qlearning};
    std::vector<RunSpec> runs;
    for (int c : s.cases)
        for (auto k : controllers) runs.push_back({k, c, s.population});
    if (s.dense_population > 0)
        for (auto k : controllers) runs.push_back({k, 3, s.dense_population});
    for (auto p : mpc2.populations) runs.push_back({ControllerKind::mpc2, mpc2.case_id, p});
    return runs;
}

inline int cmd_compare(const ExperimentConfig& cfg, const fs::path& out, std::ostream& os) {
    const auto results = execute_all(compare_runs(cfg.compare, cfg.mpc2_study), cfg.scenario, cfg.compare.parallel);
    write_results(results, cfg.scenario, out, "compare_summary.csv", os);
    return 0;
}

inline int cmd_mpc2(const ExperimentConfig& cfg, const fs::path& out, std::ostream& os) {
    std::vector<RunSpec> runs;
    for (auto p : cfg.mpc2_study.populations) runs.push_back({ControllerKind::mpc2, cfg.mpc2_study.case_id, p});
    const auto results = execute_all(runs, cfg.scenario, cfg.compare.parallel);
    write_results(results, cfg.scenario, out, "mpc2_summary.csv", os);
    return 0;
}

// ---------------------------------------------------------------------------
// train-q

/// Mean of the first and of the last tenth of the series (at least one element each).
inline std::pair<double, double> head_tail_means(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    const std::size_t k = std::max<std::size_t>(1, xs.size() / 10);
    double head = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        head += xs[i];
        tail += xs[xs.size() - k + i];
    }
    return {head / static_cast<double>(k), tail / static_cast<double>(k)};
}

inline int cmd_train_q(const ExperimentConfig& cfg, const fs::path& out, std::ostream& os) {
    const auto& sc = cfg.scenario;
    const auto trained = train_for_case(cfg.train_q.case_id, cfg.train_q.population, sc);
    {
        auto f = open_output(out / "qtable.csv");
        write_qtable_csv(f, trained.table);
    }
    {
        auto f = open_output(out / "policy_error.csv");
        f << "episode,policy_error\n";
        for (std::size_t e = 0; e < trained.policy_error.size(); ++e)
            f << e << ',' << format_number(trained.policy_error[e]) << '\n';
    }
    const auto greedy = run_scenario(ControllerKind::qlearning, cfg.train_q.case_id, cfg.train_q.population, sc, &trained.table);
    {
        auto f = open_output(out / "qlearning_greedy_trace.csv");
        write_trace_csv(f, greedy.trace, sc.params);
    }
    const auto [head, tail] = head_tail_means(trained.policy_error);
    print_table(os, {{"case", "population", "episodes", "policy error (first 10%)", "policy error (last 10%)", "RMSE [%]", "food [g]"},
                     {std::to_string(cfg.train_q.case_id), std::to_string(cfg.train_q.population),
                      std::to_string(trained.policy_error.size()), format_number(head, 4), format_number(tail, 4),
                      fixed(greedy.rmse_percent, 3), fixed(greedy.food_consumption_g, 1)}});
    return 0;
}

}  // namespace aquafeed
