#pragma once

#include <array>
#include <string>
#include <vector>

namespace pitchstab::fuzzy {

// Corners along the x axis: rises on [b1, u1], flat at 1 on [u1, u2], falls on [u2, b2].
struct TrapezoidMF {
    double b1 = 0.0;
    double u1 = 0.0;
    double u2 = 0.0;
    double b2 = 0.0;

    bool operator==(const TrapezoidMF&) const = default;
};

struct MFPartition {
    std::string name;
    std::string units;
    std::vector<TrapezoidMF> mfs;

    std::size_t size() const { return mfs.size(); }
    double hull_lo() const { return mfs.front().b1; }
    double hull_hi() const { return mfs.back().b2; }

    // Field-path diagnostics, e.g. "angle_mfs[2]: b1 > u1". `field` defaults to name.
    void validate(const std::string& field = {}) const;

    bool operator==(const MFPartition&) const = default;
};

// grid[i][j] is a 1-based output membership index.
struct RuleTable {
    std::vector<std::vector<int>> grid;

    std::size_t rows() const { return grid.size(); }
    std::size_t cols() const { return grid.empty() ? 0 : grid.front().size(); }

    void validate(std::size_t n_rows, std::size_t n_cols, std::size_t n_outputs, const std::string& field,
                  const std::string& row_source = "rows", const std::string& col_source = "columns") const;

    bool operator==(const RuleTable&) const = default;
};

struct ClippedShape {
    double area = 0.0;
    double centroid_x = 0.0;  // meaningless when area == 0
};

double mf_eval(const TrapezoidMF& mf, double x);

// Inputs outside [u1 of the first member, u2 of the last] are clamped there, so the
// outer members behave as shoulders and at least one degree is always 1.
std::vector<double> fuzzify(const MFPartition& partition, double x);

// Max-min inference: y[k] = max over cells mapping to k+1 of min(deg1[i], deg2[j]).
std::vector<double> infer(const RuleTable& rules, const std::vector<double>& deg1, const std::vector<double>& deg2,
                          std::size_t n_outputs);

// Membership clipped at height h.
ClippedShape clipped_shape(const TrapezoidMF& mf, double h);

// Overlap of two adjacent clipped memberships, mf_j before mf_j1 in partition order.
ClippedShape intersection_shape(const TrapezoidMF& mf_j, const TrapezoidMF& mf_j1, double h_j, double h_j1);

inline constexpr double kDegenerateArea = 1e-12;

// Centroid of the union of clipped memberships by inclusion-exclusion over adjacent
// pairs. Returns `fallback` when the union has no area.
double defuzzify(const MFPartition& partition, const std::vector<double>& y_inf, double fallback);

struct Gains {
    double k_theta = 0.0;
    double k_theta_dot = 0.0;

    bool operator==(const Gains&) const = default;
};

inline constexpr Gains kMediumGains{2.743, 0.506};

struct FuzzyConfig {
    MFPartition angle;           // rows of both rule tables
    MFPartition velocity;        // columns of both rule tables
    MFPartition angle_gain;      // output K_theta
    MFPartition velocity_gain;   // output K_theta_dot
    RuleTable angle_gain_rules;
    RuleTable velocity_gain_rules;

    void validate() const;
    bool operator==(const FuzzyConfig&) const = default;
};

// The shipped partitions and rule tables.
FuzzyConfig default_config();

// Two fuzzy systems in parallel sharing the input fuzzification. Keeps the last
// gains as the fallback for a degenerate defuzzification. One instance per run.
class GainScheduler {
public:
    explicit GainScheduler(FuzzyConfig config, Gains initial = kMediumGains);

    Gains schedule(double theta, double theta_dot);

    const Gains& last_gains() const { return last_; }
    const FuzzyConfig& config() const { return config_; }

private:
    FuzzyConfig config_;
    Gains last_;
};

}  // namespace pitchstab::fuzzy
