#include "pitchstab/fuzzy.hpp"

#include "pitchstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pitchstab::fuzzy {

namespace {

std::string at(const std::string& field, std::size_t i) { return field + "[" + std::to_string(i) + "]"; }

// Trapezoid of height h on [left, right] with roof [x_inf1, x_inf2].
// A.10 centroid. With d1, d2 the horizontal leg widths, L1^2 - L2^2 = d1^2 - d2^2 and
// base^2 - roof^2 = (d1 + d2)(base + roof); the common factor is cancelled so that
// the rectangle case (d1 = d2 = 0) needs no special branch.
ClippedShape trapezoid(double left, double x_inf1, double x_inf2, double right, double h) {
    const double base = right - left;
    const double roof = std::max(0.0, x_inf2 - x_inf1);
    if (!(base > 0.0) || !(h > 0.0)) return {};
    const double area = (base + roof) * h / 2.0;
    const double d1 = x_inf1 - left;
    const double d2 = right - x_inf2;
    const double centroid = left + base / 2.0 + (2.0 * roof + base) * (d1 - d2) / (6.0 * (base + roof));
    return {area, centroid};
}

}  // namespace

void MFPartition::validate(const std::string& field) const {
    const std::string f = field.empty() ? name : field;
    if (mfs.empty()) throw ValidationError(f + ": partition is empty");
    for (std::size_t i = 0; i < mfs.size(); ++i) {
        const auto& m = mfs[i];
        if (!std::isfinite(m.b1) || !std::isfinite(m.u1) || !std::isfinite(m.u2) || !std::isfinite(m.b2))
            throw ValidationError(at(f, i) + ": corners must be finite");
        if (m.b1 > m.u1) throw ValidationError(at(f, i) + ": b1 > u1");
        if (m.u1 > m.u2) throw ValidationError(at(f, i) + ": u1 > u2");
        if (m.u2 > m.b2) throw ValidationError(at(f, i) + ": u2 > b2");
        if (!(m.b2 > m.b1)) throw ValidationError(at(f, i) + ": zero width (b1 = b2)");
        if (i == 0) continue;
        const auto& p = mfs[i - 1];
        if (m.b1 < p.b1) throw ValidationError(at(f, i) + ": not ordered by b1 (b1 < previous b1)");
        if (p.u1 > m.b1) throw ValidationError(at(f, i) + ": previous u1 > b1 (ramps do not face each other)");
        if (p.b2 > m.u2) throw ValidationError(at(f, i) + ": previous b2 > u2 (ramps do not face each other)");
        if (i >= 2 && mfs[i - 2].b2 > m.b1)
            throw ValidationError(at(f, i) + ": overlaps non-adjacent member " + at(f, i - 2));
    }
}

void RuleTable::validate(std::size_t n_rows, std::size_t n_cols, std::size_t n_outputs, const std::string& field,
                         const std::string& row_source, const std::string& col_source) const {
    if (grid.size() != n_rows)
        throw ValidationError(field + ": rule grid has " + std::to_string(grid.size()) + " rows but " + row_source +
                              " has " + std::to_string(n_rows) + " memberships");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i].size() != n_cols)
            throw ValidationError(at(field, i) + ": rule grid row has " + std::to_string(grid[i].size()) +
                                  " columns but " + col_source + " has " + std::to_string(n_cols) + " memberships");
        for (std::size_t j = 0; j < grid[i].size(); ++j) {
            const int v = grid[i][j];
            if (v < 1 || static_cast<std::size_t>(v) > n_outputs)
                throw ValidationError(at(at(field, i), j) + ": output index " + std::to_string(v) +
                                      " outside 1.." + std::to_string(n_outputs));
        }
    }
}

double mf_eval(const TrapezoidMF& mf, double x) {
    if (x < mf.b1 || x > mf.b2) return 0.0;
    if (x < mf.u1) return (x - mf.b1) / (mf.u1 - mf.b1);
    if (x <= mf.u2) return 1.0;
    return (mf.b2 - x) / (mf.b2 - mf.u2);
}

std::vector<double> fuzzify(const MFPartition& partition, double x) {
    const double lo = partition.mfs.front().u1;
    const double hi = partition.mfs.back().u2;
    const double xc = std::clamp(x, lo, hi);
    std::vector<double> deg;
    deg.reserve(partition.size());
    for (const auto& mf : partition.mfs) deg.push_back(mf_eval(mf, xc));
    return deg;
}

std::vector<double> infer(const RuleTable& rules, const std::vector<double>& deg1, const std::vector<double>& deg2,
                          std::size_t n_outputs) {
    if (deg1.size() != rules.rows())
        throw ValidationError("infer: " + std::to_string(deg1.size()) + " row degrees for " +
                              std::to_string(rules.rows()) + " rule rows");
    if (deg2.size() != rules.cols())
        throw ValidationError("infer: " + std::to_string(deg2.size()) + " column degrees for " +
                              std::to_string(rules.cols()) + " rule columns");
    std::vector<double> y(n_outputs, 0.0);
    for (std::size_t i = 0; i < deg1.size(); ++i) {
        for (std::size_t j = 0; j < deg2.size(); ++j) {
            const int k = rules.grid[i][j] - 1;
            if (k < 0 || static_cast<std::size_t>(k) >= n_outputs)
                throw ValidationError("infer: rule output index out of range");
            y[static_cast<std::size_t>(k)] = std::max(y[static_cast<std::size_t>(k)], std::min(deg1[i], deg2[j]));
        }
    }
    return y;
}

ClippedShape clipped_shape(const TrapezoidMF& mf, double h) {
    h = std::min(h, 1.0);
    if (!(h > 0.0)) return {};
    if (h >= 1.0 && mf.u1 == mf.u2) {
        // A.1-A.2
        return {(mf.b2 - mf.b1) / 2.0, (mf.b1 + mf.u1 + mf.b2) / 3.0};
    }
    const double x_inf1 = (mf.u1 - mf.b1) * h + mf.b1;
    const double x_inf2 = (mf.u2 - mf.b2) * (h - 1.0) + mf.u2;
    return trapezoid(mf.b1, x_inf1, x_inf2, mf.b2, h);
}

ClippedShape intersection_shape(const TrapezoidMF& mf_j, const TrapezoidMF& mf_j1, double h_j, double h_j1) {
    const double left = mf_j1.b1;
    const double right = mf_j.b2;
    const double h = std::min({h_j, h_j1, 1.0});
    if (!(right > left) || !(h > 0.0)) return {};

    // Peak G where the rising leg of j+1 meets the falling leg of j.
    const double w1 = mf_j1.u1 - left;  // rising leg width
    const double w2 = right - mf_j.u2;  // falling leg width
    double gx = 0.0;
    double gy = std::numeric_limits<double>::infinity();
    if (w1 > 0.0 && w2 > 0.0) {
        const double m1 = 1.0 / w1;
        const double c1 = 1.0 - m1 * mf_j1.u1;
        const double m2 = -1.0 / w2;
        const double c2 = -m2 * right;
        gx = (c2 - c1) / (m1 - m2);
        gy = 1.0 - (gx - mf_j.u2) / w2;
    } else if (w2 > 0.0) {
        gx = left;
        gy = (right - left) / w2;
    } else if (w1 > 0.0) {
        gx = right;
        gy = (right - left) / w1;
    }

    if (h >= gy) return {(right - left) * gy / 2.0, (left + gx + right) / 3.0};

    const double x_inf1 = w1 * h + left;
    const double x_inf2 = right - w2 * h;
    return trapezoid(left, x_inf1, x_inf2, right, h);
}

double defuzzify(const MFPartition& partition, const std::vector<double>& y_inf, double fallback) {
    if (y_inf.size() != partition.size())
        throw ValidationError("defuzzify: " + std::to_string(y_inf.size()) + " activations for " +
                              std::to_string(partition.size()) + " memberships");
    double moment = 0.0;
    double area = 0.0;
    for (std::size_t j = 0; j < partition.size(); ++j) {
        const ClippedShape s = clipped_shape(partition.mfs[j], y_inf[j]);
        moment += s.area * s.centroid_x;
        area += s.area;
        if (j + 1 < partition.size()) {
            const ClippedShape x = intersection_shape(partition.mfs[j], partition.mfs[j + 1], y_inf[j], y_inf[j + 1]);
            moment -= x.area * x.centroid_x;
            area -= x.area;
        }
    }
    if (area <= kDegenerateArea) return fallback;
    return moment / area;
}

void FuzzyConfig::validate() const {
    angle.validate("angle_mfs");
    velocity.validate("velocity_mfs");
    angle_gain.validate("angle_gain_mfs");
    velocity_gain.validate("velocity_gain_mfs");
    angle_gain_rules.validate(angle.size(), velocity.size(), angle_gain.size(), "angle_gain_rules", "angle_mfs",
                              "velocity_mfs");
    velocity_gain_rules.validate(angle.size(), velocity.size(), velocity_gain.size(), "velocity_gain_rules",
                                 "angle_mfs", "velocity_mfs");
}

FuzzyConfig default_config() {
    FuzzyConfig c;
    c.angle = {"angle", "deg", {{-90, -45, -21, -11}, {-21, -11, 0, 3}, {0, 3, 7, 10}, {7, 10, 45, 90}}};
    c.velocity = {"velocity", "rad/s", {{-7, -3, -0.7, -0.5}, {-0.7, -0.5, 0.5, 0.7}, {0.5, 0.7, 3, 7}}};
    c.angle_gain = {"angle_gain", "", {{0, 0, 0, 1.68}, {1.68, 2.743, 2.743, 3.806}, {2.743, 3.806, 3.806, 4.869}}};
    c.velocity_gain = {
        "velocity_gain", "", {{0, 0, 0, 0.486}, {0.486, 0.506, 0.506, 0.526}, {0.506, 0.526, 0.526, 0.546}}};
    // rows NH, N, P, PH; columns N, A, P; outputs Z=1, M=2, H=3
    c.angle_gain_rules = {{{3, 3, 3}, {2, 2, 2}, {1, 1, 1}, {3, 3, 3}}};
    c.velocity_gain_rules = {{{3, 3, 3}, {2, 2, 2}, {1, 1, 1}, {2, 2, 2}}};
    return c;
}

GainScheduler::GainScheduler(FuzzyConfig config, Gains initial) : config_(std::move(config)), last_(initial) {
    config_.validate();
}

Gains GainScheduler::schedule(double theta, double theta_dot) {
    const auto d1 = fuzzify(config_.angle, theta);
    const auto d2 = fuzzify(config_.velocity, theta_dot);
    const auto ya = infer(config_.angle_gain_rules, d1, d2, config_.angle_gain.size());
    const auto yv = infer(config_.velocity_gain_rules, d1, d2, config_.velocity_gain.size());
    last_.k_theta = defuzzify(config_.angle_gain, ya, last_.k_theta);
    last_.k_theta_dot = defuzzify(config_.velocity_gain, yv, last_.k_theta_dot);
    return last_;
}

}  // namespace pitchstab::fuzzy
