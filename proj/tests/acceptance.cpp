// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "aquafeed/commands.hpp"
#include "mpc_oracle.hpp"
#include "oracles.hpp"
#include "toy_env.hpp"

using namespace aquafeed;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v, int decimals = 3) { return fixed(v, decimals); }

bool trace_is_clean(const ScenarioTrace& t) {
    for (const auto& s : t.states)
        if (!std::isfinite(s.xi) || s.xi < 0.0 || s.p < 0) return false;
    return true;
}

bool feeds_in_bounds(const ScenarioTrace& t) {
    for (const auto& u : t.inputs)
        if (!(u.f >= 0.1 && u.f <= 1.0)) return false;
    return true;
}

}  // namespace

int main() {
    const ModelParams P{};
    const ScenarioConfig sc{};
    std::vector<const ScenarioTrace*> all_traces;

    // 1. single fish in the population model vs the independent individual integrator
    {
        const auto t0 = std::chrono::steady_clock::now();
        const auto inputs = validation_inputs(150, P);
        const auto trace = simulate(make_population(1, 6.24), inputs, StockingPolicy{}, P);
        const double runtime = seconds_since(t0);
        std::vector<oracle::Inputs> in;
        for (const auto& u : inputs) in.push_back({u.f, u.T, u.DO, u.UIA});
        const double expected = oracle::individual_trajectory(6.24, in, P).back();
        const double err = std::abs(trace.current().xi - expected) / expected;
        report(1, err < 1e-3 && runtime < 1.0,
               "relative endpoint error " + format_number(err, 3) + " (< 1e-3), runtime " + num(runtime) + " s (< 1 s)");
    }

    // 2. factor functions at their closed-form points
    {
        const double e46 = std::exp(-4.6);
        const bool ok = temperature_factor(P.T_opt, P) == 1.0 &&
                        std::abs(temperature_factor(P.T_max, P) - e46) <= 1e-12 &&
                        std::abs(temperature_factor(P.T_min, P) - e46) <= 1e-12 &&
                        std::abs(uia_factor(0.73, P) - 0.5) <= 1e-12 && uia_factor(1.4, P) == 0.0 &&
                        uia_factor(3.0, P) == 0.0 &&
                        std::abs(mortality_coefficient(P.mortality_eta, P) - P.mortality_Z / 200.0) <= 1e-12;
        report(2, ok, "tau(T_opt)=1, tau(T_min/T_max)=e^-4.6, v(0.73)=0.5, v(>=1.4)=0, k1(eta)=Z/200 at 1e-12");
    }

    // 3. sensitivity ordering and mortality
    {
        const auto t0 = std::chrono::steady_clock::now();
        const auto rows = sensitivity_study(P);
        const double runtime = seconds_since(t0);
        bool ok = rows.size() == 5 && runtime < 10.0;
        std::string detail;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i > 0) ok = ok && rows[0].final_weight_g > rows[i].final_weight_g;
            ok = ok && (i == 4 ? rows[i].initial - rows[i].survivors >= 9 : rows[i].survivors == rows[i].initial);
            detail += rows[i].name + " " + num(rows[i].final_weight_g, 1) + " g " + std::to_string(rows[i].survivors) +
                      "/" + std::to_string(rows[i].initial) + "; ";
        }
        report(3, ok, detail + "runtime " + num(runtime) + " s");
    }

    // 4. case-3 mortality anchor, timed sequentially
    std::map<std::pair<ControllerKind, int>, ScenarioResult> case3;  // keyed by (controller, population)
    TrainResult q_case3;
    {
        const auto t0 = std::chrono::steady_clock::now();
        for (auto k : {ControllerKind::bangbang, ControllerKind::pid, ControllerKind::mpc1})
            case3[{k, 10}] = run_scenario(k, 3, 10, sc);
        q_case3 = train_for_case(3, 10, sc);
        case3[{ControllerKind::qlearning, 10}] = run_scenario(ControllerKind::qlearning, 3, 10, sc, &q_case3.table);
        const double runtime = seconds_since(t0);
        bool ok = runtime < 30.0;
        std::string detail;
        for (auto& [key, r] : case3) {
            const std::int64_t expected = key.first == ControllerKind::qlearning ? 0 : 1;
            ok = ok && r.deaths == expected;
            detail += std::string(to_string(key.first)) + " " + mortality_label(r) + " (want " + std::to_string(expected) + "/10); ";
        }
        report(4, ok, detail + "runtime " + num(runtime) + " s (< 30 s)");
    }

    // Remaining closed-loop runs for 5, 6, 9 and 10.
    std::vector<RunSpec> specs;
    for (int c : {1, 2})
        for (auto k : {ControllerKind::bangbang, ControllerKind::pid, ControllerKind::mpc1, ControllerKind::qlearning})
            specs.push_back({k, c, 10});
    for (auto k : {ControllerKind::bangbang, ControllerKind::pid, ControllerKind::mpc1, ControllerKind::qlearning})
        specs.push_back({k, 3, 25});
    specs.push_back({ControllerKind::mpc2, 3, 10});
    specs.push_back({ControllerKind::mpc2, 3, 25});
    const auto results = execute_all(specs, sc, true);

    std::map<std::tuple<ControllerKind, int, std::int64_t>, const ScenarioResult*> by_key;
    for (const auto& r : results) by_key[{r.controller, r.case_id, r.initial_population}] = &r;
    for (const auto& [key, r] : case3) by_key[{key.first, 3, key.second}] = &r;
    for (const auto& [key, r] : by_key) all_traces.push_back(&r->trace);
    auto get = [&](ControllerKind k, int c, std::int64_t p) { return by_key.at({k, c, p}); };

    // 5. controller comparison trends
    {
        bool ok = true;
        std::string detail;
        for (int c : {1, 2}) {
            const double bb = get(ControllerKind::bangbang, c, 10)->food_consumption_g;
            const double m1 = get(ControllerKind::mpc1, c, 10)->food_consumption_g;
            ok = ok && m1 < bb;
            detail += "case " + std::to_string(c) + " MPC1 food " + num(m1, 1) + " < BB " + num(bb, 1) + "; ";
        }
        const std::vector<std::pair<int, std::int64_t>> blocks{{1, 10}, {2, 10}, {3, 10}, {3, 25}};
        for (auto [c, p] : blocks) {
            double min_model = 1e300;
            for (auto k : {ControllerKind::bangbang, ControllerKind::pid, ControllerKind::mpc1})
                min_model = std::min(min_model, get(k, c, p)->food_consumption_g);
            const auto* q = get(ControllerKind::qlearning, c, p);
            const double ratio = q->food_consumption_g / min_model;
            ok = ok && ratio < 0.4;
            detail += "case " + std::to_string(c) + " p" + std::to_string(p) + " Q food ratio " + num(ratio) + " (< 0.4); ";
            for (auto k : {ControllerKind::bangbang, ControllerKind::pid, ControllerKind::mpc1, ControllerKind::qlearning}) {
                const double e = get(k, c, p)->rmse_percent;
                const bool in_range = e > 0.0 && e < 60.0;
                ok = ok && in_range;
                if (!in_range || k == ControllerKind::qlearning)
                    detail += std::string(to_string(k)) + " RMSE " + num(e, 2) + "%" + (in_range ? "" : " out of (0, 60)") + "; ";
            }
        }
        report(5, ok, detail);
    }

    // 6. MPC2 on the spike case
    {
        const auto* a = get(ControllerKind::mpc2, 3, 10);
        const auto* b = get(ControllerKind::mpc2, 3, 25);
        const double m1 = get(ControllerKind::mpc1, 3, 10)->food_consumption_g;
        const bool ok = a->deaths == 0 && b->deaths == 0 && a->food_consumption_g < m1;
        report(6, ok, "MPC2 deaths " + mortality_label(*a) + ", " + mortality_label(*b) + "; food p10 " +
                          num(a->food_consumption_g, 1) + " < MPC1 " + num(m1, 1));
    }

    // 7. horizon-1 solvers vs exhaustive enumeration
    {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(2024);
        Mpc1Config c1;
        c1.horizon = 1;
        Mpc2Config c2;
        c2.horizon = 1;
        int bad1 = 0, bad2 = 0;
        double worst = -1e300;
        for (int i = 0; i < 100; ++i) {
            const auto c = oracle::random_mpc_case(rng);
            const double s1 = mpc1_solve(c.state, std::vector<double>{c.reference}, std::vector<EnvInput>{c.environment}, c1, P).objective;
            const double g1 = oracle::mpc1_grid_optimum(c, c1, P, 0.05);
            bad1 += s1 > g1 + 1e-8;
            const double s2 = mpc2_solve(c.state, std::vector<double>{c.reference}, c2, P).objective;
            const double g2 = oracle::mpc2_grid_optimum(c, c2, P);
            bad2 += s2 > g2 + 1e-8;
            worst = std::max({worst, s1 - g1, s2 - g2});
        }
        const double runtime = seconds_since(t0);
        report(7, bad1 == 0 && bad2 == 0 && runtime < 60.0,
               "MPC1 misses " + std::to_string(bad1) + "/100, MPC2 misses " + std::to_string(bad2) +
                   "/100, worst excess " + format_number(worst, 3) + ", runtime " + num(runtime) + " s (< 60 s)");
    }

    // 8. Q-learning on the toy MDP and the policy-error trend
    {
        const auto expected = oracle::toy_mdp().optimal_policy(0.95);
        int matches = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            oracle::ToyEnvironment env;
            const auto r = train(env, QConfig{}, seed);
            bool same = true;
            for (std::size_t s = 0; s < 3; ++s) same = same && greedy_action(r.table, s) == expected[s];
            matches += same;
        }
        const auto [head, tail] = head_tail_means(q_case3.policy_error);
        report(8, matches == 10 && tail < head,
               "toy MDP policy matches value iteration for " + std::to_string(matches) +
                   "/10 seeds; growth policy error first 10% " + num(head, 4) + " > last 10% " + num(tail, 4));
    }

    // 9. RK4 order and clean traces
    {
        const PopulationState s0 = make_population(10, 6.24);
        const EnvInput u{1.0, P.T_opt, 5.0, 0.0};
        auto endpoint = [&](int steps) {
            PopulationState s = s0;
            for (int d = 0; d < 10; ++d) s = step_day(s, u, {}, P, steps);
            return s.xi;
        };
        const double fine = endpoint(512);
        const double e1 = std::abs(endpoint(1) - fine), e2 = std::abs(endpoint(2) - fine), e4 = std::abs(endpoint(4) - fine);
        const double order = 0.5 * (std::log2(e1 / e2) + std::log2(e2 / e4));
        bool clean = true;
        for (const auto* t : all_traces) clean = clean && trace_is_clean(*t);
        report(9, order >= 3.5 && clean,
               "observed order " + num(order, 2) + " (>= 3.5); " + std::to_string(all_traces.size()) +
                   " scenario traces free of NaN/negative biomass: " + (clean ? "yes" : "no"));
    }

    // 10. PID hand values and saturation
    {
        const PidGains g{};
        const auto big = pid_feed(5.0, 6.0, {}, g);
        const auto small = pid_feed(5.995, 6.0, {}, g);
        const auto zero = pid_feed(6.0, 6.0, {}, g);
        bool bounded = true;
        for (const auto* t : all_traces) bounded = bounded && feeds_in_bounds(*t);
        const bool ok = big.feed == 1.0 && small.feed == 0.1 && zero.feed == 0.1 && bounded;
        report(10, ok, "e=1 -> " + format_number(big.feed) + ", e=0.005 -> " + format_number(small.feed) + ", e=0 -> " +
                           format_number(zero.feed) + "; feeds within [0.1, 1] in every run: " + (bounded ? "yes" : "no"));
    }

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
