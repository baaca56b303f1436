#pragma once

#include "pitchstab/capture.hpp"
#include "pitchstab/fuzzy.hpp"
#include "pitchstab/plant.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pitchstab {

enum class ControllerMode { None, LqrFixed, LqrFuzzy };

struct CaptureConfig {
    bool enabled = false;
    CapturePointParams params;
    double support_threshold = 0.05;  // m
    double max_step = 0.08;           // m
    double step_period = 0.625;       // s, minimum time between two steps
};

// Bisection settings for tolerance_search; magnitude is the energy (impulse) or the
// bias (constant) of disturbances[event].
struct ToleranceSpec {
    std::size_t event = 0;
    double lo = 0.0;
    double hi = 1.0;
    double resolution = 0.01;
    int trials = 1;
    double pass_fraction = 1.0;
};

struct ScenarioConfig {
    std::string name = "scenario";
    PlantConfig plant;
    ControllerMode controller = ControllerMode::LqrFixed;
    double q11 = 40.0;       // fixed design
    double vn22 = 35.0;      // filter tuning
    fuzzy::FuzzyConfig fuzzy = fuzzy::default_config();
    CaptureConfig capture;
    std::vector<DisturbanceEvent> disturbances;
    double duration = 5.0;   // s
    double theta0 = 0.0;     // deg
    double theta_dot0 = 0.0;
    double neutral = 0.0;    // deg, added to the recorded command
    double u_limit = 30.0;   // deg
    double fall_threshold = 45.0;
    std::uint64_t seed = 0;
    std::optional<ToleranceSpec> tolerance;

    void validate() const;
};

struct SimRecord {
    double t = 0.0;
    double theta_true = 0.0;
    double theta_dot_true = 0.0;
    double theta_meas = 0.0;
    double theta_dot_meas = 0.0;
    double theta_hat = 0.0;
    double theta_dot_hat = 0.0;
    double u = 0.0;
    double k_theta = 0.0;
    double k_theta_dot = 0.0;
    double x_cp = 0.0;
    bool step_active = false;
    bool disturbance = false;

    bool operator==(const SimRecord&) const = default;
};

enum class Outcome { Stood, Fell };

struct SimTrace {
    std::vector<SimRecord> records;
    Outcome outcome = Outcome::Stood;
    int steps_taken = 0;
    std::optional<double> onset;  // time of the first disturbance

    bool operator==(const SimTrace&) const = default;
};

// Per step: disturbances, sense, schedule gains from the estimate, control law,
// capture point from the estimated velocity, filter update, optional step, plant step.
// The command at step k only uses measurements up to step k-1 through the estimate.
SimTrace run_scenario(const ScenarioConfig& config);

struct TransientMetrics {
    std::optional<double> rise_time;
    std::optional<double> settling_time;
    std::optional<double> max_overshoot;
    std::optional<double> steady_state_error;
    std::optional<double> robustness_delta;
    double final_value = 0.0;
    double extremum = 0.0;
};

// Metrics on a sampled response. Final value is the mean of the last 5% of
// samples, the extremum is the post-onset sample farthest from it. Rise time spans
// the first crossings of 10% and 90% of the way from the extremum to the final
// value; settling time runs from onset until the response stays within
// settle_band * |final - extremum| of the final value.
TransientMetrics transient_metrics(const std::vector<double>& t, const std::vector<double>& y, double onset,
                                   double settle_band = 0.02);

// theta channel of a trace; onset is the first disturbance, else the first sample.
TransientMetrics transient_metrics(const SimTrace& trace, double settle_band = 0.02);

struct ToleranceResult {
    std::optional<double> tolerated;  // absent when the range bottom already fails
    bool bottom_failed = false;
    int bisection_steps = 0;
    int scenario_runs = 0;
};

ToleranceResult tolerance_search(const ScenarioConfig& base, const ToleranceSpec& spec);

const char* to_string(ControllerMode m);
const char* to_string(Outcome o);

}  // namespace pitchstab
