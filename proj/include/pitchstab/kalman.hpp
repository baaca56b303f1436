#pragma once

#include "pitchstab/statespace.hpp"

namespace pitchstab {

struct CovariancePair {
    Matrix vd;  // process noise, n x n, symmetric PSD
    Matrix vn;  // measurement noise, p x p, symmetric PD

    // Throws ValidationError naming the offending field ("vn: not positive definite").
    void validate(Eigen::Index n, Eigen::Index p) const;
};

// vd = I, vn = diag(1e-6, vn22); vn22 is the tuning knob (35 on the robot).
CovariancePair default_covariances(double vn22 = 35.0);

struct FilterDesign {
    Matrix kf;
    Matrix p_riccati;
    double closed_loop_radius = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

struct RiccatiOptions {
    double tolerance = 1e-12;
    int max_iterations = 10000;
};

// Fixed-point iteration P <- A P A' + Vd - A P C'(Vn + C P C')^-1 C P A' from P0 = Vd.
Matrix solve_filter_riccati(const StateSpaceModel& model, const CovariancePair& cov,
                            const RiccatiOptions& opt = {}, int* iterations = nullptr);

double filter_riccati_residual(const StateSpaceModel& model, const CovariancePair& cov, const Matrix& p);

Matrix filter_gain(const StateSpaceModel& model, const Matrix& p_riccati, const Matrix& vn);

// Solve, gain, and certify (residual < 1e-9, A - Kf C Schur stable).
FilterDesign design_filter(const StateSpaceModel& model, const CovariancePair& cov);

// Predictor form: x_hat' = A x_hat + B u + Kf (y - C x_hat).
Vector filter_step(const Matrix& kf, const StateSpaceModel& model, const Vector& x_hat, const Vector& u,
                   const Vector& y);

inline Vector filter_step(const FilterDesign& design, const StateSpaceModel& model, const Vector& x_hat,
                          const Vector& u, const Vector& y) {
    return filter_step(design.kf, model, x_hat, u, y);
}

inline constexpr double kRiccatiResidualLimit = 1e-9;

}  // namespace pitchstab
