#include "pitchstab/capture.hpp"

#include "pitchstab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pitchstab {

void CapturePointParams::validate() const {
    if (!(z_com > 0.0) || !std::isfinite(z_com)) throw ValidationError("capture_point.z_com: must be positive");
    if (!(g > 0.0) || !std::isfinite(g)) throw ValidationError("capture_point.g: must be positive");
    if (!std::isfinite(x_offset)) throw ValidationError("capture_point.x_offset: must be finite");
}

CapturePointResult capture_point_step(const CapturePointState& state, const CapturePointParams& params,
                                      double theta_dot_hat) {
    CapturePointResult r;
    r.state = state;
    const double last = state.theta_dot_last;
    if (last != 0.0 && std::abs((theta_dot_hat - last) / last) < 0.1)
        r.state.counter_gyro += 1;
    else
        r.state.counter_gyro = 0;
    r.theta_dot_cp = theta_dot_hat * std::exp(-static_cast<double>(r.state.counter_gyro));
    r.state.theta_dot_last = theta_dot_hat;
    r.x_cp = r.theta_dot_cp * params.z_com * std::sqrt(params.z_com / params.g) + params.x_offset;
    return r;
}

StepCommand stepping_command(double x_cp, double support_threshold, double max_step) {
    if (std::abs(x_cp) <= support_threshold) return {};
    return {true, std::clamp(x_cp, -max_step, max_step)};
}

}  // namespace pitchstab
