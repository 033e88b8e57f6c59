#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "aquafeed/trace.hpp"
#include "oracles.hpp"

using namespace aquafeed;

namespace {

const ModelParams P{};

std::vector<oracle::Inputs> to_oracle(const std::vector<EnvInput>& in) {
    std::vector<oracle::Inputs> out;
    for (const auto& u : in) out.push_back({u.f, u.T, u.DO, u.UIA});
    return out;
}

}  // namespace

TEST(Factors, TemperatureAtBoundsAndOptimum) {
    EXPECT_EQ(temperature_factor(33.0, P), 1.0);
    EXPECT_NEAR(temperature_factor(40.0, P), 0.0100518357, 1e-9);
    EXPECT_NEAR(temperature_factor(24.0, P), 0.0100518357, 1e-9);
}

TEST(Factors, UiaRamp) {
    EXPECT_EQ(uia_factor(0.05, P), 1.0);
    EXPECT_EQ(uia_factor(1.4, P), 0.0);
    EXPECT_EQ(uia_factor(3.0, P), 0.0);
    EXPECT_NEAR(uia_factor(0.73, P), 0.5, 1e-12);
}

TEST(Factors, DissolvedOxygenRampIsIncreasing) {
    EXPECT_EQ(do_factor(P.do_upper() + 1.0, P), 1.0);
    EXPECT_EQ(do_factor(P.do_lower(), P), 0.0);
    EXPECT_NEAR(do_factor(0.5 * (P.do_lower() + P.do_upper()), P), 0.5, 1e-12);
    // The tabulated values are kept as given; only the ramp is ordered.
    EXPECT_EQ(P.DO_crit, 0.3);
    EXPECT_EQ(P.DO_min, 1.0);
}

TEST(Factors, DenseGridShapeProperties) {
    double prev_v = 2.0, prev_s = -1.0;
    for (int i = 0; i <= 20000; ++i) {
        const double x = 0.001 * i;  // 0..20
        const double t = temperature_factor(20.0 + x, P), v = uia_factor(x * 0.1, P), s = do_factor(x * 0.5, P);
        ASSERT_GE(t, 0.0);
        ASSERT_LE(t, 1.0);
        ASSERT_LE(v, prev_v);
        ASSERT_GE(s, prev_s);
        ASSERT_TRUE(v >= 0.0 && v <= 1.0 && s >= 0.0 && s <= 1.0);
        if (i > 0) {
            // continuity: no jumps larger than the slope allows
            ASSERT_LT(prev_v - v, 0.01);
            ASSERT_LT(s - prev_s, 0.01);
        }
        prev_v = v;
        prev_s = s;
    }
}

TEST(Factors, AgreeWithOracleFormulas) {
    for (double T = 20.0; T <= 42.0; T += 0.37) EXPECT_NEAR(temperature_factor(T, P), oracle::tau(T, P), 1e-12);
    for (double u = 0.0; u <= 2.0; u += 0.013) EXPECT_NEAR(uia_factor(u, P), oracle::v(u, P), 1e-12);
    for (double d = 0.0; d <= 3.0; d += 0.017) EXPECT_NEAR(do_factor(d, P), oracle::sigma(d, P), 1e-12);
}

TEST(Mortality, LogisticInFractions) {
    EXPECT_NEAR(mortality_coefficient(0.80, P), 0.49705, 1e-12);
    EXPECT_NEAR(mortality_coefficient(0.0, P), 0.9941 / (1.0 + std::exp(8.288)), 1e-12);
    EXPECT_NEAR(mortality_coefficient(0.0, P), 0.000249, 1e-6);
    EXPECT_NEAR(mortality_coefficient(50.0, P), 0.9941, 1e-12);
    double prev = 0.0;
    for (double u = 0.0; u < 3.0; u += 0.01) {
        const double k = mortality_coefficient(u, P);
        ASSERT_GT(k, prev);
        ASSERT_LE(k, P.mortality_Z / 100.0);
        prev = k;
    }
}

TEST(Coefficients, AnabolismAndCatabolism) {
    EXPECT_EQ(anabolism_coefficient({0.0, 27.0, 0.6, 0.0}, P), 0.0);
    EXPECT_NEAR(anabolism_coefficient({1.0, 33.0, 5.0, 0.0}, P), 0.8 * 0.62 * 0.47, 1e-12);
    EXPECT_NEAR(anabolism_coefficient({0.5, 33.0, 5.0, 0.0}, P), 0.11656, 1e-12);
    EXPECT_NEAR(catabolism_coefficient(24.0, P), 0.00133, 1e-15);
    EXPECT_NEAR(catabolism_coefficient(33.0, P), 0.00133 * std::exp(0.0132 * 9.0), 1e-15);
    EXPECT_NEAR(catabolism_coefficient(33.0, P), 0.0014978, 1e-7);
    EXPECT_NEAR(catabolism_coefficient(40.0, P), 0.0016427, 1e-7);
}

TEST(BiomassRhs, HandEvaluatedTerms) {
    EXPECT_EQ(biomass_rhs({0.0, 0, 0}, {1.0, 33.0, 5.0, 0.0}, {}, P), 0.0);
    const PopulationState s{62.4, 10, 0};
    const double expected = 0.23312 * std::pow(62.4, 0.67) - 0.00133 * std::exp(0.0132 * 9.0) * std::pow(62.4, 0.81) -
                            10.0 * (0.9941 / (1.0 + std::exp(8.288))) * 6.24;
    EXPECT_NEAR(biomass_rhs(s, {1.0, 33.0, 5.0, 0.0}, {}, P), expected, 1e-12);
    EXPECT_LT(biomass_rhs(s, {0.0, 33.0, 5.0, 0.0}, {}, P), biomass_rhs(s, {1.0, 33.0, 5.0, 0.0}, {}, P));
    EXPECT_THROW(biomass_rhs({-1.0, 1, 0}, {}, {}, P), std::domain_error);
}

TEST(BiomassRhs, StockingAddsInflow) {
    const PopulationState s{62.4, 10, 0};
    const double base = biomass_rhs(s, {1.0, 33.0, 5.0, 0.0}, {}, P);
    EXPECT_NEAR(biomass_rhs(s, {1.0, 33.0, 5.0, 0.0}, {2, 6.24}, P) - base, 12.48, 1e-12);
}

TEST(StepDay, MortalityIsTruncated) {
    const auto no_deaths = advance_day(make_population(10, 6.24), {1.0, 33.0, 5.0, 0.0}, {}, P);
    EXPECT_EQ(no_deaths.deaths, 0);
    EXPECT_EQ(no_deaths.state.p, 10);

    EXPECT_NEAR(10.0 * mortality_coefficient(1.0, P), 8.83, 0.01);
    const auto spike = advance_day(make_population(10, 6.24), {1.0, 33.0, 5.0, 1.0}, {}, P);
    EXPECT_EQ(spike.deaths, 8);
    EXPECT_EQ(spike.state.p, 2);
    EXPECT_EQ(spike.state.t, 1);
}

TEST(StepDay, DeathsRemoveMeanWeight) {
    const EnvInput u{1.0, 33.0, 5.0, 1.0};
    const auto grown = DailyGrowth(u, {}, P).integrate(62.4, default_steps_per_day);
    const auto out = advance_day(make_population(10, 6.24), u, {}, P);
    EXPECT_NEAR(out.state.xi, grown * 2.0 / 10.0, 1e-12);
    EXPECT_NEAR(out.state.mean_weight(), grown / 10.0, 1e-12);
}

TEST(StepDay, EmptyPondIsAbsorbing) {
    const auto s = step_day({0.0, 0, 3}, {1.0, 33.0, 5.0, 0.0}, {}, P);
    EXPECT_EQ(s.p, 0);
    EXPECT_EQ(s.xi, 0.0);
    EXPECT_EQ(s.t, 4);
    EXPECT_EQ(s.mean_weight(), 0.0);
    // stray biomass with no fish is cleared
    EXPECT_EQ(step_day({5.0, 0, 0}, {}, {}, P).xi, 0.0);
}

TEST(StepDay, TotalMortalityEmptiesThePond) {
    const auto out = advance_day(make_population(1, 6.24), {1.0, 33.0, 5.0, 50.0}, {}, P);
    EXPECT_EQ(out.state.p, 1);  // k1 < 1 never kills the last fish
    auto s = make_population(3, 6.24);
    ModelParams certain = P;
    certain.mortality_Z = 100.0;
    certain.mortality_beta = 200.0;
    s = step_day(s, {1.0, 33.0, 5.0, 5.0}, {}, certain);
    EXPECT_EQ(s.p, 0);
    EXPECT_EQ(s.xi, 0.0);
}

TEST(StepDay, StockingAddsFish) {
    const auto s = step_day(make_population(10, 6.24), {1.0, 33.0, 5.0, 0.0}, {2, 6.24}, P);
    EXPECT_EQ(s.p, 12);
    EXPECT_GT(s.xi, 12 * 6.24);
}

TEST(StepDay, RejectsInvalidState) {
    EXPECT_THROW(step_day({-1.0, 2, 0}, {}, {}, P), std::domain_error);
    EXPECT_THROW(step_day({1.0, -2, 0}, {}, {}, P), std::domain_error);
    EXPECT_THROW(step_day({1.0, 1, 0}, {}, {}, P, 0), std::invalid_argument);
}

TEST(Simulate, ZeroDaysKeepsInitialState) {
    const auto trace = simulate(make_population(10, 6.24), {}, {}, P);
    ASSERT_EQ(trace.states.size(), 1u);
    EXPECT_EQ(trace.days(), 0u);
    EXPECT_DOUBLE_EQ(trace.current().xi, 62.4);
    EXPECT_EQ(food_consumption_g(trace), 0.0);
}

TEST(Simulate, SingleFishMatchesIndividualOracle) {
    const std::vector<EnvInput> inputs(150, EnvInput{1.0, 33.0, 5.0, 0.0});
    const auto trace = simulate(make_population(1, 6.24), inputs, {}, P);
    const auto w = oracle::individual_trajectory(6.24, to_oracle(inputs), P);
    for (std::size_t d = 0; d < w.size(); ++d) ASSERT_NEAR(trace.states[d].xi / w[d], 1.0, 1e-6) << "day " << d;
}

TEST(Simulate, StarvationStrictlyShrinksBiomass) {
    const std::vector<EnvInput> inputs(60, EnvInput{0.0, 30.0, 5.0, 0.0});
    const auto trace = simulate(make_population(10, 50.0), inputs, {}, P);
    for (std::size_t d = 1; d < trace.states.size(); ++d) ASSERT_LT(trace.states[d].xi, trace.states[d - 1].xi);
}

TEST(Simulate, PopulationNeverIncreasesWithoutStocking) {
    std::vector<EnvInput> inputs;
    for (int d = 0; d < 100; ++d) inputs.push_back({0.8, 31.0, 5.0, 0.9 * (0.5 - 0.5 * std::cos(d * 0.3))});
    const auto trace = simulate(make_population(50, 6.24), inputs, {}, P);
    for (std::size_t d = 1; d < trace.states.size(); ++d) ASSERT_LE(trace.states[d].p, trace.states[d - 1].p);
    EXPECT_LT(trace.current().p, 50);
    EXPECT_EQ(trace.total_deaths(), 50 - trace.current().p);
}

TEST(Simulate, OnlyFeedTimesPhotoperiodMatters) {
    ModelParams doubled = P;
    doubled.rho = 1.6;
    const std::vector<EnvInput> a(80, EnvInput{0.4, 31.0, 5.0, 0.02});
    const std::vector<EnvInput> b(80, EnvInput{0.25, 31.0, 5.0, 0.02});
    const auto ta = simulate(make_population(10, 6.24), a, {}, P);
    const auto tb = simulate(make_population(10, 6.24), b, {}, doubled);
    EXPECT_NEAR(ta.current().xi, tb.current().xi, 1e-9 * ta.current().xi);
}

TEST(Simulate, BaselineTenFishGolden) {
    const std::vector<EnvInput> inputs(150, EnvInput{1.0, 33.0, 5.0, 0.0});
    const auto trace = simulate(make_population(10, 6.24), inputs, {}, P);
    // Same order of magnitude as the tabulated 7922.9 g; the exact horizon of that run is unknown.
    EXPECT_NEAR(trace.current().xi, 3860.3, 0.5);
    EXPECT_EQ(trace.current().p, 10);
}

TEST(Rk4, FourthOrderEndpointConvergence) {
    const std::vector<EnvInput> inputs(150, EnvInput{0.9, 31.0, 5.0, 0.0});
    std::vector<double> end;
    for (int steps : {1, 2, 4, 8}) end.push_back(simulate(make_population(10, 6.24), inputs, {}, P, steps).current().xi);
    for (int k = 0; k + 2 < 4; ++k) {
        const double order = std::log2(std::abs(end[k] - end[k + 1]) / std::abs(end[k + 1] - end[k + 2]));
        EXPECT_GE(order, 3.5) << "halving " << k;
    }
}

TEST(Trace, FoodAccounting) {
    ScenarioTrace trace(make_population(10, 10.0), 0.1);
    trace.record({1.0, 33.0, 5.0, 0.0}, {PopulationState{110.0, 10, 1}, 0});
    EXPECT_DOUBLE_EQ(food_consumption_g(trace), 10.0);
    EXPECT_DOUBLE_EQ(trace.cumulative_food_g.back(), 10.0);

    const std::vector<EnvInput> lo(30, EnvInput{0.1, 33.0, 5.0, 0.0});
    auto t = simulate(make_population(10, 6.24), lo, {}, P);
    const double f1 = food_consumption_g(t);
    for (auto& u : t.inputs) u.f = 0.2;  // same weights, doubled feed
    EXPECT_DOUBLE_EQ(food_consumption_g(t), 2.0 * f1);
    for (auto& u : t.inputs) u.f = 0.0;
    EXPECT_EQ(food_consumption_g(t), 0.0);
}

TEST(Trace, CsvLayout) {
    const std::vector<EnvInput> inputs(2, EnvInput{1.0, 33.0, 5.0, 0.0});
    const auto trace = simulate(make_population(10, 6.24), inputs, {}, P);
    std::ostringstream os;
    write_trace_csv(os, trace, P);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "day,xi_g,p,mean_w_g,f,T,DO,UIA,tau,sigma,v,k1,deaths,cum_food_g");
    std::getline(is, line);
    EXPECT_EQ(line.rfind("0,62.4,10,6.24,1,33,5,0,1,1,1,", 0), 0u) << line;
    int rows = 1;
    std::string last;
    while (std::getline(is, line)) {
        ++rows;
        last = line;
    }
    EXPECT_EQ(rows, 3);
    EXPECT_NE(last.find(",,,,,,,,,"), std::string::npos);
}
