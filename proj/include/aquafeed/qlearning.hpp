#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aquafeed/trace.hpp"

namespace aquafeed {

/**
 * Variable-resolution bins over the normalized tracking error (w - w_d)/w_d.
 * Bin k is [edges[k-1], edges[k]); bin 0 and the last bin catch everything
 * outside the edge range.
 */
struct StateGrid {
    std::vector<double> edges;

    static StateGrid variable_resolution() {
        return {{-1.0, -0.5, -0.2, -0.1, -0.05, -0.02, -0.01, 0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0}};
    }

    std::size_t size() const { return edges.size() + 1; }

    std::size_t index(double error) const {
        return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), error) - edges.begin());
    }

    void validate() const {
        if (edges.empty()) throw std::invalid_argument("StateGrid: at least one edge required");
        if (!std::is_sorted(edges.begin(), edges.end()) ||
            std::adjacent_find(edges.begin(), edges.end()) != edges.end())
            throw std::invalid_argument("StateGrid: edges must be strictly increasing");
    }
};

inline std::size_t discretize_state(double mean_weight, double desired_weight, const StateGrid& grid) {
    if (!(desired_weight > 0.0)) throw std::invalid_argument("discretize_state: desired weight must be positive");
    return grid.index((mean_weight - desired_weight) / desired_weight);
}

/// -[e^2 + lambda*f^2] with the relative error e clamped to [-1, 1].
inline double reward(double mean_weight, double desired_weight, double feed, double lambda) {
    if (!(desired_weight > 0.0)) throw std::invalid_argument("reward: desired weight must be positive");
    const double e = std::clamp((mean_weight - desired_weight) / desired_weight, -1.0, 1.0);
    return -(e * e + lambda * feed * feed);
}

struct QConfig {
    double alpha = 0.1;
    double gamma = 0.95;
    double epsilon_initial = 1.0;
    double epsilon_decay = 0.995;  ///< multiplicative, applied after every episode
    double epsilon_floor = 0.01;
    int episodes = 2000;
    double lambda = 0.6;
    StateGrid grid = StateGrid::variable_resolution();
    std::vector<double> actions{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("QConfig: alpha must lie in [0, 1]");
        if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("QConfig: gamma must lie in [0, 1)");
        if (!(epsilon_initial >= 0.0 && epsilon_initial <= 1.0 && epsilon_floor >= 0.0 && epsilon_floor <= 1.0))
            throw std::invalid_argument("QConfig: epsilon values must lie in [0, 1]");
        if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0))
            throw std::invalid_argument("QConfig: epsilon_decay must lie in (0, 1]");
        if (episodes < 0) throw std::invalid_argument("QConfig: episodes must be >= 0");
        if (!(lambda >= 0.0)) throw std::invalid_argument("QConfig: lambda must be >= 0");
        grid.validate();
        if (actions.empty()) throw std::invalid_argument("QConfig: action set must be nonempty");
        for (double a : actions)
            if (!(a >= 0.1 && a <= 1.0)) throw std::invalid_argument("QConfig: actions must lie in [0.1, 1]");
        if (!std::is_sorted(actions.begin(), actions.end()) ||
            std::adjacent_find(actions.begin(), actions.end()) != actions.end())
            throw std::invalid_argument("QConfig: actions must be strictly increasing");
    }
};

/// Dense state-by-action value table, zero-initialized.
class QTable {
public:
    QTable() = default;
    QTable(std::size_t states, std::size_t actions) : states_(states), actions_(actions), values_(states * actions, 0.0) {}

    std::size_t states() const { return states_; }
    std::size_t actions() const { return actions_; }

    double& operator()(std::size_t s, std::size_t a) { return values_.at(s * actions_ + a); }
    double operator()(std::size_t s, std::size_t a) const { return values_.at(s * actions_ + a); }

    std::span<const double> row(std::size_t s) const {
        if (s >= states_) throw std::out_of_range("QTable: state index out of range");
        return {values_.data() + s * actions_, actions_};
    }

    bool operator==(const QTable&) const = default;

private:
    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::vector<double> values_;
};

/// Argmax over the row; ties go to the lowest index, i.e. the smallest feed for an ascending action set.
inline std::size_t greedy_action(const QTable& q, std::size_t s) {
    const auto row = q.row(s);
    return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

inline void td_update(QTable& q, std::size_t s, std::size_t a, double r, std::size_t s_next, double alpha,
                      double gamma) {
    const auto next = q.row(s_next);
    const double best_next = *std::max_element(next.begin(), next.end());
    q(s, a) += alpha * (r + gamma * best_next - q(s, a));
}

struct Transition {
    std::size_t next_state;
    double reward;
};

/// Episodic environment driven by discrete actions.
template <class E>
concept QEnvironment = requires(E env, std::size_t a) {
    { env.num_states() } -> std::convertible_to<std::size_t>;
    { env.num_actions() } -> std::convertible_to<std::size_t>;
    { env.episode_length() } -> std::convertible_to<std::size_t>;
    { env.reset() } -> std::convertible_to<std::size_t>;
    { env.step(a) } -> std::convertible_to<Transition>;
};

struct TrainResult {
    QTable table;
    std::vector<double> policy_error;  ///< per episode, fraction of states whose greedy action changed
};

/**
 * Epsilon-greedy tabular Q-learning. Every episode runs the full
 * episode_length() steps from reset(); the final step still bootstraps from
 * the successor (time-limit truncation, not a terminal state).
 */
template <QEnvironment Env>
TrainResult train(Env& env, const QConfig& config, std::uint64_t seed) {
    if (!(config.alpha >= 0.0 && config.alpha <= 1.0 && config.gamma >= 0.0 && config.gamma < 1.0 &&
          config.episodes >= 0))
        throw std::invalid_argument("train: invalid learning parameters");
    const std::size_t n_states = env.num_states();
    const std::size_t n_actions = env.num_actions();
    TrainResult result{QTable(n_states, n_actions), {}};
    result.policy_error.reserve(static_cast<std::size_t>(config.episodes));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> any_action(0, n_actions - 1);

    std::vector<std::size_t> policy(n_states);
    for (std::size_t s = 0; s < n_states; ++s) policy[s] = greedy_action(result.table, s);

    double epsilon = config.epsilon_initial;
    for (int episode = 0; episode < config.episodes; ++episode) {
        std::size_t s = env.reset();
        const std::size_t steps = env.episode_length();
        for (std::size_t t = 0; t < steps; ++t) {
            const std::size_t a = coin(rng) < epsilon ? any_action(rng) : greedy_action(result.table, s);
            const Transition tr = env.step(a);
            td_update(result.table, s, a, tr.reward, tr.next_state, config.alpha, config.gamma);
            s = tr.next_state;
        }
        std::size_t changed = 0;
        for (std::size_t st = 0; st < n_states; ++st) {
            const std::size_t g = greedy_action(result.table, st);
            changed += g != policy[st];
            policy[st] = g;
        }
        result.policy_error.push_back(static_cast<double>(changed) / static_cast<double>(n_states));
        epsilon = std::max(config.epsilon_floor, epsilon * config.epsilon_decay);
    }
    return result;
}

/**
 * The feeding problem as a Q-learning environment: one step per day, state
 * from the relative tracking error of the mean weight against the reference,
 * reward evaluated on the post-transition weight.
 */
class GrowthEnvironment {
public:
    GrowthEnvironment(const ModelParams& params, const PopulationState& initial, std::vector<double> reference,
                      std::vector<EnvInput> environment, const QConfig& config,
                      int steps_per_day = default_steps_per_day)
        : params_(params),
          initial_(initial),
          reference_(std::move(reference)),
          environment_(std::move(environment)),
          grid_(config.grid),
          actions_(config.actions),
          lambda_(config.lambda),
          steps_per_day_(steps_per_day) {
        if (reference_.size() < environment_.size() + 1)
            throw std::invalid_argument("GrowthEnvironment: reference must cover every day plus the final state");
        reset();
    }

    std::size_t num_states() const { return grid_.size(); }
    std::size_t num_actions() const { return actions_.size(); }
    std::size_t episode_length() const { return environment_.size(); }

    std::size_t reset() {
        state_ = initial_;
        day_ = 0;
        return observe();
    }

    Transition step(std::size_t action) {
        EnvInput u = environment_.at(day_);
        u.f = actions_.at(action);
        state_ = step_day(state_, u, StockingPolicy{}, params_, steps_per_day_);
        ++day_;
        return {observe(), reward(state_.mean_weight(), reference_[day_], u.f, lambda_)};
    }

    const PopulationState& state() const { return state_; }

private:
    std::size_t observe() const { return discretize_state(state_.mean_weight(), reference_[day_], grid_); }

    ModelParams params_;
    PopulationState initial_;
    std::vector<double> reference_;
    std::vector<EnvInput> environment_;
    StateGrid grid_;
    std::vector<double> actions_;
    double lambda_;
    int steps_per_day_;
    PopulationState state_;
    std::size_t day_ = 0;
};

/// Rows of (state_index, action_index, value).
inline void write_qtable_csv(std::ostream& os, const QTable& q) {
    os << "state_index,action_index,value\n";
    for (std::size_t s = 0; s < q.states(); ++s)
        for (std::size_t a = 0; a < q.actions(); ++a) os << s << ',' << a << ',' << format_number(q(s, a), 17) << '\n';
}

inline QTable read_qtable_csv(std::istream& is, std::size_t states, std::size_t actions) {
    QTable q(states, actions);
    std::string line;
    if (!std::getline(is, line) || line.rfind("state_index,action_index,value", 0) != 0)
        throw std::runtime_error("Q-table CSV: missing header");
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::size_t s = 0, a = 0;
        double v = 0.0;
        char c1 = 0, c2 = 0;
        if (!(row >> s >> c1 >> a >> c2 >> v) || c1 != ',' || c2 != ',' || s >= states || a >= actions)
            throw std::runtime_error("Q-table CSV: malformed row at line " + std::to_string(line_no));
        q(s, a) = v;
    }
    return q;
}

}  // namespace aquafeed
