#include "pitchstab/batch.hpp"
#include "pitchstab/config.hpp"
#include "pitchstab/errors.hpp"
#include "pitchstab/harness.hpp"
#include "pitchstab/lqr.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pitchstab;

namespace {

ScenarioConfig quiet(ControllerMode mode, PlantMode plant = PlantMode::Nonlinear) {
    ScenarioConfig c;
    c.controller = mode;
    c.plant.mode = plant;
    c.duration = 3.0;
    return c;
}

DisturbanceEvent impulse(double at, double energy, double dir = -1) {
    DisturbanceEvent e;
    e.at_time = at;
    e.energy = energy;
    e.direction = dir;
    return e;
}

// Synthetic response on a 0.024 s grid: rest, a push to -22.21 deg at 0.696 s,
// recovery through 3.046 deg, settling at 2.391 deg.
void landmark_trace(std::vector<double>& t, std::vector<double>& y) {
    const double dt = 0.024;
    for (int k = 0; k < 400; ++k) {
        t.push_back(k * dt);
        double v = 2.391;
        if (k == 29) v = -22.21;
        else if (k == 30) v = -19.0;  // past the 10% level
        else if (k > 30 && k < 78) v = -19.0 + (k - 30) * (18.9 / 48.0);  // below the 90% level
        else if (k >= 78 && k <= 100) v = (k - 78) * (3.046 / 22.0);  // reaches 90% at k = 78
        else if (k > 100 && k <= 131) v = 3.046 - (k - 100) * (0.046 / 31.0);  // still outside the band
        else if (k >= 132 && k < 140) v = 2.391 + 0.4 * (140 - k) / 8.0;
        y.push_back(v);
    }
}

}  // namespace

TEST(RunScenario, AtRestStaysAtRest) {
    for (auto mode : {ControllerMode::None, ControllerMode::LqrFixed, ControllerMode::LqrFuzzy}) {
        for (auto plant : {PlantMode::Linear, PlantMode::Nonlinear}) {
            const auto tr = run_scenario(quiet(mode, plant));
            EXPECT_EQ(tr.outcome, Outcome::Stood);
            ASSERT_EQ(tr.records.size(), static_cast<std::size_t>(std::llround(3.0 * 41.664)));
            for (const auto& r : tr.records) {
                EXPECT_EQ(r.theta_true, 0.0);
                EXPECT_EQ(r.u, 0.0);
            }
        }
    }
}

TEST(RunScenario, UniformTimeGrid) {
    const auto tr = run_scenario(quiet(ControllerMode::LqrFixed));
    for (std::size_t k = 0; k < tr.records.size(); ++k) EXPECT_DOUBLE_EQ(tr.records[k].t, k / 41.664);
}

TEST(RunScenario, LinearReleaseConverges) {
    auto c = quiet(ControllerMode::LqrFixed, PlantMode::Linear);
    c.theta0 = -22.21;
    c.duration = 8.0;
    const auto tr = run_scenario(c);
    const auto d = design_lqr(c.plant.model, default_costs(40));
    ASSERT_LT(d.closed_loop_radius, 1.0);
    EXPECT_EQ(tr.outcome, Outcome::Stood);
    EXPECT_LT(std::abs(tr.records.back().theta_true), 0.01 * 22.21);
    EXPECT_EQ(tr.records.front().k_theta, d.k(0, 0));
    EXPECT_EQ(tr.records.front().k_theta_dot, d.k(0, 1));
}

TEST(RunScenario, FuzzyRecoversWhereFixedFalls) {
    auto c = config::load_scenario("scenarios/recover_large_angle.json");
    c.controller = ControllerMode::LqrFixed;
    const auto fixed = run_scenario(c);
    c.controller = ControllerMode::LqrFuzzy;
    const auto fuzzy = run_scenario(c);
    EXPECT_EQ(fixed.outcome, Outcome::Fell);
    EXPECT_EQ(fuzzy.outcome, Outcome::Stood);
    EXPECT_NEAR(fuzzy.records.front().k_theta, 3.806, 1e-6);
    EXPECT_LT(fixed.records.size(), fuzzy.records.size());
}

TEST(RunScenario, NoLeakageBeforeDisturbance) {
    auto c = quiet(ControllerMode::LqrFixed);
    c.disturbances = {impulse(1.0, 0.2)};
    const auto tr = run_scenario(c);
    const auto k_imp = static_cast<std::size_t>(std::lround(1.0 * 41.664));
    ASSERT_GT(tr.records.size(), k_imp + 1);
    for (std::size_t k = 0; k <= k_imp; ++k) EXPECT_EQ(tr.records[k].u, 0.0) << "step " << k;
    EXPECT_TRUE(tr.records[k_imp].disturbance);
    EXPECT_NE(tr.records[k_imp].theta_dot_true, 0.0);
    EXPECT_NE(tr.records[k_imp + 1].u, 0.0);
    ASSERT_TRUE(tr.onset);
    EXPECT_DOUBLE_EQ(*tr.onset, k_imp / 41.664);
}

TEST(RunScenario, FallTruncatesTrace) {
    auto c = quiet(ControllerMode::None);
    c.disturbances = {impulse(0.5, 1.5)};
    const auto tr = run_scenario(c);
    EXPECT_EQ(tr.outcome, Outcome::Fell);
    EXPECT_LT(tr.records.size(), static_cast<std::size_t>(3.0 * 41.664));
}

TEST(RunScenario, DeterministicForSeed) {
    auto c = config::load_scenario("scenarios/push_front_noisy.json");
    const auto a = run_scenario(c);
    const auto b = run_scenario(c);
    EXPECT_EQ(a, b);
    c.seed += 1;
    EXPECT_NE(run_scenario(c).records, a.records);
}

TEST(RunScenario, CapturePointSteps) {
    auto c = config::load_scenario("scenarios/walking_pull.json");
    const auto tr = run_scenario(c);
    EXPECT_GE(tr.steps_taken, 1);
    c.capture.enabled = false;
    const auto off = run_scenario(c);
    EXPECT_EQ(off.steps_taken, 0);
    for (const auto& r : off.records) EXPECT_FALSE(r.step_active);
}

TEST(RunScenario, RejectsInvalidConfig) {
    auto c = quiet(ControllerMode::LqrFixed);
    c.duration = 0;
    EXPECT_THROW(run_scenario(c), ValidationError);
}

TEST(TransientMetrics, LandmarkTrace) {
    std::vector<double> t, y;
    landmark_trace(t, y);
    const auto m = transient_metrics(t, y, 0.696);
    ASSERT_TRUE(m.rise_time && m.settling_time && m.max_overshoot && m.robustness_delta);
    EXPECT_NEAR(*m.rise_time, 1.152, 5e-4);
    EXPECT_NEAR(*m.settling_time, 2.472, 5e-4);
    EXPECT_NEAR(*m.max_overshoot, 0.655, 5e-4);
    EXPECT_NEAR(*m.robustness_delta, 24.601, 5e-4);
    EXPECT_NEAR(m.final_value, 2.391, 1e-12);
    EXPECT_NEAR(m.extremum, -22.21, 1e-12);
}

TEST(TransientMetrics, UndefinedWhenNoCrossing) {
    // Still accelerating when the record ends: the last samples leave the band.
    std::vector<double> t, y;
    for (int k = 0; k < 100; ++k) {
        t.push_back(k * 0.1);
        y.push_back(static_cast<double>(k) * k * k);
    }
    const auto m = transient_metrics(t, y, 0.0);
    EXPECT_FALSE(m.settling_time.has_value());
}

TEST(TransientMetrics, FlatResponse) {
    const auto m = transient_metrics({0, 1, 2}, {1, 1, 1}, 0);
    EXPECT_FALSE(m.rise_time);
    EXPECT_DOUBLE_EQ(*m.robustness_delta, 0.0);
    EXPECT_THROW(transient_metrics({0}, {1}, 0), ValidationError);
}

TEST(ToleranceSearch, ZeroMagnitudeAlwaysPasses) {
    auto c = quiet(ControllerMode::None);
    c.disturbances = {impulse(0.5, 0.0)};
    ToleranceSpec s;
    s.lo = 0;
    s.hi = 5;
    s.resolution = 0.01;
    const auto r = tolerance_search(c, s);
    EXPECT_FALSE(r.bottom_failed);
    ASSERT_TRUE(r.tolerated);
    EXPECT_LT(*r.tolerated, 1.0);
}

TEST(ToleranceSearch, BisectionStepCount) {
    auto c = quiet(ControllerMode::LqrFixed);
    c.disturbances = {impulse(0.5, 0.0)};
    ToleranceSpec s;
    s.lo = 0;
    s.hi = 2;
    s.resolution = 0.003;
    const auto r = tolerance_search(c, s);
    EXPECT_EQ(r.bisection_steps, static_cast<int>(std::ceil(std::log2((s.hi - s.lo) / s.resolution))));
    EXPECT_EQ(r.scenario_runs, r.bisection_steps + 1);
}

TEST(ToleranceSearch, ReportsRangeBottomFailure) {
    auto c = quiet(ControllerMode::None);
    c.disturbances = {impulse(0.5, 0.0)};
    ToleranceSpec s;
    s.lo = 1.5;
    s.hi = 3;
    const auto r = tolerance_search(c, s);
    EXPECT_TRUE(r.bottom_failed);
    EXPECT_FALSE(r.tolerated);
}

TEST(ToleranceSearch, FeedbackNeverReducesTolerance) {
    const auto base = config::load_scenario("scenarios/push_front.json");
    double prev = -1;
    for (auto mode : {ControllerMode::None, ControllerMode::LqrFixed, ControllerMode::LqrFuzzy}) {
        auto c = base;
        c.controller = mode;
        const auto r = tolerance_search(c, *c.tolerance);
        ASSERT_TRUE(r.tolerated);
        EXPECT_GE(*r.tolerated, prev) << to_string(mode);
        prev = *r.tolerated;
    }
}

TEST(Batch, ParallelMatchesSerial) {
    const auto base = config::load_scenario("scenarios/push_front_noisy.json");
    std::vector<ScenarioConfig> cs;
    for (int i = 0; i < 12; ++i) {
        auto c = base;
        c.seed = 100 + i;
        c.controller = static_cast<ControllerMode>(i % 3);
        cs.push_back(c);
    }
    EXPECT_EQ(run_batch(cs), run_batch_serial(cs));
}

TEST(Batch, PropagatesErrors) {
    std::vector<ScenarioConfig> cs(3, quiet(ControllerMode::LqrFixed));
    cs[1].duration = -1;
    EXPECT_THROW(run_batch(cs), ValidationError);
}
