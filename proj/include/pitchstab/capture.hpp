#pragma once

namespace pitchstab {

// Defaults for a kid-size robot.
struct CapturePointParams {
    double z_com = 0.25;     // m
    double g = 9.81;         // m/s^2
    double x_offset = 0.0;   // m

    void validate() const;
};

struct CapturePointState {
    double theta_dot_last = 0.0;
    int counter_gyro = 0;
};

struct CapturePointResult {
    double x_cp = 0.0;
    double theta_dot_cp = 0.0;
    CapturePointState state;
};

// One call of the damped estimate. The velocity is the filter estimate, never the raw gyro.
// A zero previous velocity counts as "changed" and resets the counter.
CapturePointResult capture_point_step(const CapturePointState& state, const CapturePointParams& params,
                                      double theta_dot_hat);

struct StepCommand {
    bool active = false;
    double amplitude_x = 0.0;  // m, signed
};

StepCommand stepping_command(double x_cp, double support_threshold, double max_step);

}  // namespace pitchstab
