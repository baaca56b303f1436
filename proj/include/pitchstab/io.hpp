#pragma once

#include "pitchstab/harness.hpp"
#include "pitchstab/statespace.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace pitchstab::io {

// Shortest representation that parses back to the same double.
std::string format_number(double v);

// CSV with header t,u,theta,theta_dot. The sample rate is 1 / median(dt); every
// interval must lie within 1% of the median.
TimeSeries read_sysid_csv(std::istream& in, const std::string& source = "csv");
TimeSeries read_sysid_csv_file(const std::string& path);

void write_sysid_csv(std::ostream& out, const TimeSeries& ts);

inline constexpr const char* kTraceHeader =
    "t,theta_true,theta_dot_true,theta_meas,theta_dot_meas,theta_hat,theta_dot_hat,u,k_theta,k_theta_dot,x_cp,"
    "step_active,disturbance";

void write_trace_csv(std::ostream& out, const SimTrace& trace);

nlohmann::json metrics_to_json(const TransientMetrics& m, const SimTrace& trace);

}  // namespace pitchstab::io
