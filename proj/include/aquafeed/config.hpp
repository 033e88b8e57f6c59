#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aquafeed/scenarios.hpp"

namespace aquafeed {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ValidationSettings {
    std::vector<std::int64_t> populations{1, 5, 10, 50, 100};
    int period = 150;
    double tolerance = 1e-3;  ///< relative endpoint error allowed for p = 1
};

struct CompareSettings {
    std::vector<int> cases{1, 2, 3};
    std::int64_t population = 10;
    std::int64_t dense_population = 25;  ///< extra case-3 block
    bool parallel = true;
};

struct Mpc2StudySettings {
    int case_id = 3;
    std::vector<std::int64_t> populations{10, 25};
};

struct TrainQSettings {
    int case_id = 1;
    std::int64_t population = 10;
};

/// Everything one CLI invocation reads from its configuration file.
struct ExperimentConfig {
    std::optional<std::string> experiment;
    std::optional<std::string> output_dir;
    ScenarioConfig scenario{};
    std::optional<std::string> reference_csv;
    std::optional<std::string> uia_csv;
    ValidationSettings validation{};
    SensitivitySettings sensitivity{};
    CompareSettings compare{};
    Mpc2StudySettings mpc2_study{};
    TrainQSettings train_q{};
};

namespace detail {

/**
 * Maps JSON-pointer-like paths ("mpc1.horizon", "q.actions.3") to the line
 * they start on, so schema errors can point into the file.
 */
class LineIndex {
public:
    explicit LineIndex(const std::string& text) { scan(text); }

    int line_of(const std::string& path) const {
        auto it = lines_.find(path);
        return it == lines_.end() ? 0 : it->second;
    }

private:
    struct Frame {
        bool object;
        std::string key;
        int index = -1;
    };

    std::string current_path(const std::vector<Frame>& stack) const {
        std::string path;
        for (const auto& f : stack) {
            const std::string part = f.object ? f.key : std::to_string(f.index);
            if (part.empty()) continue;
            path += path.empty() ? part : "." + part;
        }
        return path;
    }

    void scan(const std::string& text) {
        std::vector<Frame> stack;
        int line = 1;
        bool expect_key = false;
        auto mark_value = [&] {
            if (!stack.empty() && !stack.back().object) {
                ++stack.back().index;
                lines_.emplace(current_path(stack), line);
            }
        };
        for (std::size_t i = 0; i < text.size(); ++i) {
            const char c = text[i];
            if (c == '\n') {
                ++line;
                continue;
            }
            if (c == '"') {
                std::string s;
                for (++i; i < text.size() && text[i] != '"'; ++i) {
                    if (text[i] == '\\' && i + 1 < text.size()) ++i;
                    s += text[i];
                }
                if (expect_key && !stack.empty() && stack.back().object) {
                    stack.back().key = s;
                    lines_.emplace(current_path(stack), line);
                    expect_key = false;
                } else {
                    mark_value();
                }
                continue;
            }
            switch (c) {
                case '{':
                    mark_value();
                    stack.push_back({true, {}});
                    expect_key = true;
                    break;
                case '[':
                    mark_value();
                    stack.push_back({false, {}});
                    break;
                case '}':
                case ']':
                    if (!stack.empty()) stack.pop_back();
                    break;
                case ',':
                    if (!stack.empty() && stack.back().object) expect_key = true;
                    break;
                default:
                    if ((std::isalnum(static_cast<unsigned char>(c)) || c == '-') &&
                        (i == 0 || !(std::isalnum(static_cast<unsigned char>(text[i - 1])) || text[i - 1] == '.' ||
                                     text[i - 1] == '-' || text[i - 1] == '+')))
                        mark_value();
                    break;
            }
        }
    }

    std::map<std::string, int> lines_;
};

/// Typed, strict reader over one JSON object; unknown keys are errors.
class ObjectReader {
public:
    ObjectReader(const nlohmann::json& j, std::string path, const LineIndex& lines)
        : j_(j), path_(std::move(path)), lines_(lines) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    [[noreturn]] void fail(const std::string& path, const std::string& what) const {
        const int line = lines_.line_of(path);
        std::string where = line > 0 ? "line " + std::to_string(line) + ": " : std::string();
        throw ConfigError(where + "field '" + (path.empty() ? "<root>" : path) + "': " + what);
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const nlohmann::json* find(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out) {
        if (const auto* v = find(key)) {
            if (!v->is_number()) fail(child(key), "expected a number");
            out = v->get<double>();
        }
    }

    template <class Int>
    void integer(const std::string& key, Int& out) {
        if (const auto* v = find(key)) {
            if (!v->is_number_integer()) fail(child(key), "expected an integer");
            out = v->get<Int>();
        }
    }

    void optional_number(const std::string& key, std::optional<double>& out) {
        if (const auto* v = find(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            if (!v->is_number()) fail(child(key), "expected a number or null");
            out = v->get<double>();
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (const auto* v = find(key)) {
            if (!v->is_boolean()) fail(child(key), "expected true or false");
            out = v->get<bool>();
        }
    }

    void string(const std::string& key, std::optional<std::string>& out) {
        if (const auto* v = find(key)) {
            if (!v->is_string()) fail(child(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    template <class T>
    void array(const std::string& key, std::vector<T>& out) {
        if (const auto* v = find(key)) {
            if (!v->is_array() || v->empty()) fail(child(key), "expected a nonempty array");
            std::vector<T> values;
            for (std::size_t i = 0; i < v->size(); ++i) {
                const auto& e = (*v)[i];
                const bool ok = std::is_integral_v<T> ? e.is_number_integer() : e.is_number();
                if (!ok) fail(child(key) + "." + std::to_string(i), std::is_integral_v<T> ? "expected an integer" : "expected a number");
                values.push_back(e.get<T>());
            }
            out = std::move(values);
        }
    }

    template <class F>
    void object(const std::string& key, F&& read) {
        if (const auto* v = find(key)) {
            ObjectReader sub(*v, child(key), lines_);
            read(sub);
            sub.finish();
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) fail(child(it.key()), "unknown key");
    }

private:
    const nlohmann::json& j_;
    std::string path_;
    const LineIndex& lines_;
    std::set<std::string> seen_;
};

inline void read_input(ObjectReader& r, EnvInput& u) {
    r.number("f", u.f);
    r.number("T", u.T);
    r.number("DO", u.DO);
    r.number("UIA", u.UIA);
}

inline void read_search(ObjectReader& r, CoordinateSearchOptions& s) {
    r.integer("max_sweeps", s.max_sweeps);
    r.number("improvement_tolerance", s.improvement_tolerance);
    r.integer("scan_points", s.scan_points);
    r.number("line_tolerance", s.line_tolerance);
}

inline void read_model(ObjectReader& r, ModelParams& p) {
    r.number("m", p.m);
    r.number("n", p.n);
    r.number("b", p.b);
    r.number("a", p.a);
    r.number("h", p.h);
    r.number("rho", p.rho);
    r.number("k_min", p.k_min);
    r.number("j", p.j);
    r.number("T_opt", p.T_opt);
    r.number("T_min", p.T_min);
    r.number("T_max", p.T_max);
    r.number("kappa", p.kappa);
    r.number("UIA_crit", p.UIA_crit);
    r.number("UIA_max", p.UIA_max);
    r.number("DO_crit", p.DO_crit);
    r.number("DO_min", p.DO_min);
    r.number("mortality_Z", p.mortality_Z);
    r.number("mortality_beta", p.mortality_beta);
    r.number("mortality_eta", p.mortality_eta);
    r.number("R_fraction", p.R_fraction);
}

inline void read_mpc1(ObjectReader& r, Mpc1Config& c) {
    r.integer("horizon", c.horizon);
    r.number("lambda", c.lambda);
    r.number("f_min", c.f_min);
    r.number("f_max", c.f_max);
    r.number("w0", c.w0);
    std::optional<double> w_end;
    r.optional_number("w_end", w_end);
    if (w_end) c.w_end = *w_end;
    r.optional_number("max_feed_move", c.max_feed_move);
    r.number("state_penalty", c.state_penalty);
    r.integer("steps_per_day", c.steps_per_day);
    r.integer("descent_starts", c.descent_starts);
    r.object("search", [&](ObjectReader& s) { read_search(s, c.search); });
}

inline void read_mpc2(ObjectReader& r, Mpc2Config& c) {
    r.integer("horizon", c.horizon);
    r.number("lambda1", c.lambda1);
    r.number("lambda2", c.lambda2);
    r.number("lambda3", c.lambda3);
    r.number("lambda4", c.lambda4);
    r.object("lower", [&](ObjectReader& s) { read_input(s, c.lower); });
    r.object("upper", [&](ObjectReader& s) { read_input(s, c.upper); });
    r.number("T_d", c.T_d);
    r.number("DO_d", c.DO_d);
    r.number("UIA_d", c.UIA_d);
    r.number("w0", c.w0);
    std::optional<double> w_end;
    r.optional_number("w_end", w_end);
    if (w_end) c.w_end = *w_end;
    r.object("max_move", [&](ObjectReader& s) {
        EnvInput move{1.0, 40.0, 10.0, 1.4};
        if (c.max_move) move = *c.max_move;
        read_input(s, move);
        c.max_move = move;
    });
    r.number("state_penalty", c.state_penalty);
    r.integer("steps_per_day", c.steps_per_day);
    r.integer("descent_starts", c.descent_starts);
    r.object("search", [&](ObjectReader& s) { read_search(s, c.search); });
}

inline void read_q(ObjectReader& r, QConfig& q) {
    r.number("alpha", q.alpha);
    r.number("gamma", q.gamma);
    r.number("epsilon_initial", q.epsilon_initial);
    r.number("epsilon_decay", q.epsilon_decay);
    r.number("epsilon_floor", q.epsilon_floor);
    r.integer("episodes", q.episodes);
    r.number("lambda", q.lambda);
    r.array("grid_edges", q.grid.edges);
    r.array("actions", q.actions);
}

inline void read_cases(ObjectReader& r, CaseSettings& c) {
    r.number("temperature", c.temperature);
    r.number("temperature_amplitude", c.temperature_amplitude);
    r.number("temperature_period_days", c.temperature_period_days);
    r.number("dissolved_oxygen", c.dissolved_oxygen);
    r.number("uia_level", c.uia_level);
    r.number("uia_amplitude", c.uia_amplitude);
    r.number("uia_period_days", c.uia_period_days);
    r.number("spike_peak", c.spike_peak);
    r.number("spike_fwhm_days", c.spike_fwhm_days);
    r.number("spike_day", c.spike_day);
}

template <class F>
void rethrow_as_config_error(const char* section, F&& check) {
    try {
        check();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid ") + section + ": " + e.what());
    }
}

}  // namespace detail

/**
 * Parses and validates a configuration document. An empty object yields the
 * default study. Throws ConfigError with a line and field diagnostic on the
 * first problem; nothing is run before the whole document checks out.
 */
inline ExperimentConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // Byte offset -> line for the syntax error.
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw ConfigError("line " + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
    }
    const detail::LineIndex lines(text);
    detail::ObjectReader root(j, "", lines);

    ExperimentConfig cfg;
    auto& sc = cfg.scenario;
    root.string("experiment", cfg.experiment);
    if (cfg.experiment) {
        static const std::set<std::string> kinds{"validate", "sensitivity", "compare", "train-q", "mpc2"};
        if (!kinds.count(*cfg.experiment))
            root.fail("experiment", "must be one of validate, sensitivity, compare, train-q, mpc2");
    }
    root.string("output_dir", cfg.output_dir);
    if (const auto* seed = root.find("seed")) {
        if (!seed->is_number_unsigned()) root.fail("seed", "expected a non-negative integer");
        sc.seed = seed->get<std::uint64_t>();
    }
    root.object("model", [&](detail::ObjectReader& r) { detail::read_model(r, sc.params); });
    root.object("scenario", [&](detail::ObjectReader& r) {
        r.integer("period", sc.period);
        r.number("initial_weight", sc.initial_weight);
        r.integer("steps_per_day", sc.steps_per_day);
        r.number("w_end_factor", sc.w_end_factor);
        r.object("reference", [&](detail::ObjectReader& s) {
            s.number("feed", sc.reference.feed);
            s.number("initial_weight", sc.reference.initial_weight);
            s.string("csv", cfg.reference_csv);
        });
        r.object("cases", [&](detail::ObjectReader& s) {
            detail::read_cases(s, sc.cases);
            s.string("uia_csv", cfg.uia_csv);
        });
    });
    root.object("pid", [&](detail::ObjectReader& r) {
        r.number("kp", sc.pid.kp);
        r.number("ki", sc.pid.ki);
        r.number("kd", sc.pid.kd);
        r.number("f_min", sc.pid.f_min);
        r.number("f_max", sc.pid.f_max);
    });
    root.object("mpc1", [&](detail::ObjectReader& r) { detail::read_mpc1(r, sc.mpc1); });
    root.object("mpc2", [&](detail::ObjectReader& r) { detail::read_mpc2(r, sc.mpc2); });
    root.object("q", [&](detail::ObjectReader& r) { detail::read_q(r, sc.q); });
    root.object("validation", [&](detail::ObjectReader& r) {
        r.array("populations", cfg.validation.populations);
        r.integer("period", cfg.validation.period);
        r.number("tolerance", cfg.validation.tolerance);
    });
    root.object("sensitivity", [&](detail::ObjectReader& r) {
        r.integer("period", cfg.sensitivity.period);
        r.integer("population", cfg.sensitivity.population);
        r.number("initial_weight", cfg.sensitivity.initial_weight);
        r.number("cycle_days", cfg.sensitivity.cycle_days);
        r.number("dissolved_oxygen", cfg.sensitivity.dissolved_oxygen);
    });
    root.object("compare", [&](detail::ObjectReader& r) {
        r.array("cases", cfg.compare.cases);
        r.integer("population", cfg.compare.population);
        r.integer("dense_population", cfg.compare.dense_population);
        r.boolean("parallel", cfg.compare.parallel);
    });
    root.object("mpc2_study", [&](detail::ObjectReader& r) {
        r.integer("case", cfg.mpc2_study.case_id);
        r.array("populations", cfg.mpc2_study.populations);
    });
    root.object("train_q", [&](detail::ObjectReader& r) {
        r.integer("case", cfg.train_q.case_id);
        r.integer("population", cfg.train_q.population);
    });
    root.finish();

    detail::rethrow_as_config_error("scenario settings", [&] { sc.validate(); });
    auto check = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    for (int c : cfg.compare.cases) check(c >= 1 && c <= 3, "field 'compare.cases': case ids must be 1, 2 or 3");
    check(cfg.mpc2_study.case_id >= 1 && cfg.mpc2_study.case_id <= 3, "field 'mpc2_study.case': must be 1, 2 or 3");
    check(cfg.train_q.case_id >= 1 && cfg.train_q.case_id <= 3, "field 'train_q.case': must be 1, 2 or 3");
    check(cfg.compare.population > 0 && cfg.compare.dense_population >= 0,
          "field 'compare.population': must be positive");
    check(cfg.train_q.population > 0, "field 'train_q.population': must be positive");
    for (auto p : cfg.mpc2_study.populations) check(p > 0, "field 'mpc2_study.populations': must be positive");
    for (auto p : cfg.validation.populations) check(p > 0, "field 'validation.populations': must be positive");
    check(cfg.validation.period >= 1, "field 'validation.period': must be >= 1");
    check(cfg.validation.tolerance > 0.0, "field 'validation.tolerance': must be positive");
    check(cfg.sensitivity.period >= 1 && cfg.sensitivity.population > 0 && cfg.sensitivity.initial_weight > 0.0 &&
              cfg.sensitivity.cycle_days >= 2.0,
          "section 'sensitivity': period, population and initial_weight must be positive, cycle_days >= 2");
    return cfg;
}

/// Reads the file, parses it, and resolves CSV paths relative to the file's directory.
inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    ExperimentConfig cfg = parse_config(buf.str());

    const auto slash = path.find_last_of('/');
    const std::string dir = slash == std::string::npos ? std::string() : path.substr(0, slash + 1);
    auto resolve = [&](const std::string& p) { return !p.empty() && p.front() == '/' ? p : dir + p; };

    if (cfg.reference_csv) {
        std::ifstream ref(resolve(*cfg.reference_csv));
        if (!ref) throw ConfigError("field 'scenario.reference.csv': cannot open '" + *cfg.reference_csv + "'");
        try {
            cfg.scenario.reference_override = load_reference_csv(ref).weight_g;
        } catch (const std::runtime_error& e) {
            throw ConfigError(std::string("field 'scenario.reference.csv': ") + e.what());
        }
        if (cfg.scenario.reference_override->size() < static_cast<std::size_t>(cfg.scenario.period) + 1)
            throw ConfigError("field 'scenario.reference.csv': shorter than the culture period");
    }
    if (cfg.uia_csv) {
        std::ifstream uia(resolve(*cfg.uia_csv));
        if (!uia) throw ConfigError("field 'scenario.cases.uia_csv': cannot open '" + *cfg.uia_csv + "'");
        try {
            cfg.scenario.cases.uia_override = load_series_csv(uia, "UIA series", false);
        } catch (const std::runtime_error& e) {
            throw ConfigError(std::string("field 'scenario.cases.uia_csv': ") + e.what());
        }
    }
    return cfg;
}

}  // namespace aquafeed
