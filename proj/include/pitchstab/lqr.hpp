#pragma once

#include "pitchstab/kalman.hpp"
#include "pitchstab/statespace.hpp"

#include <vector>

namespace pitchstab {

struct CostPair {
    Matrix q;  // n x n, symmetric PSD
    Matrix r;  // m x m, symmetric PD

    void validate(Eigen::Index n, Eigen::Index m) const;
};

// q = diag(q11, 1), r = 1.
CostPair default_costs(double q11 = 40.0);

struct ControlDesign {
    Matrix k;
    Matrix p_riccati;
    double closed_loop_radius = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

// Fixed-point iteration of A'PA - P - A'PB(B'PB + R)^-1 B'PA + Q = 0 from P0 = Q.
Matrix solve_control_riccati(const StateSpaceModel& model, const CostPair& cost, const RiccatiOptions& opt = {},
                             int* iterations = nullptr);

double control_riccati_residual(const StateSpaceModel& model, const CostPair& cost, const Matrix& p);

// K = (B'PB + R)^-1 B'PA
Matrix control_gain(const StateSpaceModel& model, const Matrix& p_riccati, const CostPair& cost);

ControlDesign design_lqr(const StateSpaceModel& model, const CostPair& cost);

// u = clamp(-K x_hat, +/- u_limit), elementwise. u is a delta on the neutral posture.
Vector control_law(const Matrix& k, const Vector& x_hat, double u_limit);

// 1/2 sum (x'Qx + u'Ru) over the finite trace.
double quadratic_cost(const std::vector<Vector>& xs, const std::vector<Vector>& us, const CostPair& cost);

// Observer-based feedback composite [[A, -BK], [Kf C, A - BK - Kf C]] on (x, x_hat).
Matrix separation_composite(const StateSpaceModel& model, const Matrix& k, const Matrix& kf);

}  // namespace pitchstab
