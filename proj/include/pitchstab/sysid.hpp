#pragma once

#include "pitchstab/statespace.hpp"

#include <vector>

namespace pitchstab {

// Row k of psi is [x_k^T, u_k^T]; row k of y is x_{k+1}^T.
struct RegressionSystem {
    Matrix psi;
    Matrix y;
};

struct IdentificationResult {
    StateSpaceModel model;
    Vector residual_rms;        // per output
    double condition_estimate;  // reciprocal condition of psi^T psi
};

inline constexpr double kMinReciprocalCondition = 1e-12;

// Outputs must be full-state measurements (C = I).
RegressionSystem build_regression(const TimeSeries& data, Eigen::Index n);

// Least squares fit of theta = [A^T; B^T] through a QR factorization of psi.
IdentificationResult identify(const TimeSeries& data, Eigen::Index n);

// Uses raw second moments, not mean-removed variances.
// Returns a percentage clipped below at 0.
double vaf(const std::vector<Vector>& measured, const std::vector<Vector>& estimated);

// Single-channel variant used for per-channel reporting.
double vaf(const std::vector<double>& measured, const std::vector<double>& estimated);

}  // namespace pitchstab
