#include "pitchstab/io.hpp"

#include "pitchstab/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace pitchstab::io {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw ValidationError(where + ": not a finite number: \"" + s + "\"");
    return v;
}

}  // namespace

std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf.data(), ptr);
}

TimeSeries read_sysid_csv(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(source + ": empty file");
    const auto header = split(line);
    const std::vector<std::string> expected{"t", "u", "theta", "theta_dot"};
    if (header != expected) throw ValidationError(source + ": header must be t,u,theta,theta_dot");

    std::vector<double> t;
    TimeSeries ts;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line);
        const std::string where = source + ":" + std::to_string(row);
        if (cells.size() != 4) throw ValidationError(where + ": expected 4 columns, got " + std::to_string(cells.size()));
        t.push_back(parse_double(cells[0], where + " t"));
        ts.inputs.push_back(Vector::Constant(1, parse_double(cells[1], where + " u")));
        Vector y(2);
        y << parse_double(cells[2], where + " theta"), parse_double(cells[3], where + " theta_dot");
        ts.outputs.push_back(y);
    }
    if (t.size() < 2) throw ValidationError(source + ": need at least 2 samples");
    std::vector<double> dts;
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double d = t[k] - t[k - 1];
        if (!(d > 0.0)) throw ValidationError(source + ":" + std::to_string(k + 2) + ": t is not increasing");
        dts.push_back(d);
    }
    std::vector<double> sorted = dts;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
    double median = sorted[sorted.size() / 2];
    if (sorted.size() % 2 == 0) {
        const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2));
        median = 0.5 * (median + lower);
    }
    for (std::size_t k = 0; k < dts.size(); ++k)
        if (std::abs(dts[k] - median) > 0.01 * median)
            throw ValidationError(source + ":" + std::to_string(k + 3) + ": sample interval " + format_number(dts[k]) +
                                  " s deviates more than 1% from the median " + format_number(median) + " s");
    ts.sample_rate = 1.0 / median;
    return ts;
}

TimeSeries read_sysid_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path + ": cannot open");
    return read_sysid_csv(in, path);
}

void write_sysid_csv(std::ostream& out, const TimeSeries& ts) {
    out << "t,u,theta,theta_dot\n";
    for (std::size_t k = 0; k < ts.size(); ++k) {
        out << format_number(static_cast<double>(k) / ts.sample_rate) << ',' << format_number(ts.inputs[k](0)) << ','
            << format_number(ts.outputs[k](0)) << ',' << format_number(ts.outputs[k](1)) << '\n';
    }
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    out << kTraceHeader << '\n';
    for (const auto& r : trace.records) {
        for (double v : {r.t, r.theta_true, r.theta_dot_true, r.theta_meas, r.theta_dot_meas, r.theta_hat,
                         r.theta_dot_hat, r.u, r.k_theta, r.k_theta_dot, r.x_cp})
            out << format_number(v) << ',';
        out << (r.step_active ? 1 : 0) << ',' << (r.disturbance ? 1 : 0) << '\n';
    }
}

nlohmann::json metrics_to_json(const TransientMetrics& m, const SimTrace& trace) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    double max_abs = 0.0;
    for (const auto& r : trace.records) max_abs = std::max(max_abs, std::abs(r.theta_true));
    return {{"rise_time", opt(m.rise_time)},
            {"settling_time", opt(m.settling_time)},
            {"max_overshoot", opt(m.max_overshoot)},
            {"steady_state_error", opt(m.steady_state_error)},
            {"robustness_delta", opt(m.robustness_delta)},
            {"final_value", m.final_value},
            {"extremum", m.extremum},
            {"max_abs_theta", max_abs},
            {"steps_taken", trace.steps_taken},
            {"samples", trace.records.size()},
            {"outcome", to_string(trace.outcome)}};
}

}  // namespace pitchstab::io
