#include "pitchstab/lqr.hpp"

#include "pitchstab/errors.hpp"
#include "riccati_iteration.hpp"

#include <algorithm>
#include <string>

namespace pitchstab {

namespace {

Matrix control_rhs(const StateSpaceModel& model, const CostPair& cost, const Matrix& p) {
    const Matrix& a = model.a();
    const Matrix& b = model.b();
    const Matrix bpa = b.transpose() * p * a;
    const Matrix s = b.transpose() * p * b + cost.r;
    return a.transpose() * p * a - bpa.transpose() * s.ldlt().solve(bpa) + cost.q;
}

}  // namespace

void CostPair::validate(Eigen::Index n, Eigen::Index m) const {
    if (q.rows() != n || q.cols() != n)
        throw ValidationError("q: expected " + std::to_string(n) + "x" + std::to_string(n));
    if (r.rows() != m || r.cols() != m)
        throw ValidationError("r: expected " + std::to_string(m) + "x" + std::to_string(m));
    if (!q.allFinite() || !r.allFinite()) throw ValidationError("q, r: entries must be finite");
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff()))
        throw ValidationError("q: not symmetric");
    if ((r - r.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, r.cwiseAbs().maxCoeff()))
        throw ValidationError("r: not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eq(q);
    if (eq.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, q.norm()))
        throw ValidationError("q: not positive semidefinite");
    Eigen::SelfAdjointEigenSolver<Matrix> er(r);
    if (!(er.eigenvalues().minCoeff() > 0.0)) throw ValidationError("r: not positive definite");
}

CostPair default_costs(double q11) {
    Matrix q = Matrix::Identity(2, 2);
    q(0, 0) = q11;
    return {q, Matrix::Identity(1, 1)};
}

Matrix solve_control_riccati(const StateSpaceModel& model, const CostPair& cost, const RiccatiOptions& opt,
                             int* iterations) {
    cost.validate(model.states(), model.inputs());
    return detail::riccati_fixed_point(
        cost.q, [&](const Matrix& x) { return control_rhs(model, cost, x); }, opt, iterations, "control");
}

double control_riccati_residual(const StateSpaceModel& model, const CostPair& cost, const Matrix& p) {
    return (control_rhs(model, cost, p) - p).norm();
}

Matrix control_gain(const StateSpaceModel& model, const Matrix& p_riccati, const CostPair& cost) {
    const Matrix& b = model.b();
    const Matrix s = b.transpose() * p_riccati * b + cost.r;
    Eigen::FullPivLU<Matrix> lu(s);
    if (!lu.isInvertible()) throw NumericalError("B'PB + R is singular");
    return lu.solve(b.transpose() * p_riccati * model.a());
}

ControlDesign design_lqr(const StateSpaceModel& model, const CostPair& cost) {
    ControlDesign d;
    d.p_riccati = solve_control_riccati(model, cost, {}, &d.iterations);
    d.residual = control_riccati_residual(model, cost, d.p_riccati);
    if (!(d.residual < kRiccatiResidualLimit))
        throw NumericalError("control Riccati residual " + std::to_string(d.residual) + " exceeds 1e-9");
    d.k = control_gain(model, d.p_riccati, cost);
    d.closed_loop_radius = spectral_radius(model.a() - model.b() * d.k);
    if (!(d.closed_loop_radius < 1.0)) throw NumericalError("A - B K is not Schur stable");
    return d;
}

Vector control_law(const Matrix& k, const Vector& x_hat, double u_limit) {
    if (k.cols() != x_hat.size()) throw ValidationError("control_law: gain/state dimension mismatch");
    const double lim = std::max(0.0, u_limit);
    return (-k * x_hat).cwiseMax(-lim).cwiseMin(lim);
}

double quadratic_cost(const std::vector<Vector>& xs, const std::vector<Vector>& us, const CostPair& cost) {
    if (xs.size() != us.size()) throw ValidationError("quadratic_cost: state and input traces differ in length");
    double j = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k)
        j += xs[k].dot(cost.q * xs[k]) + us[k].dot(cost.r * us[k]);
    return 0.5 * j;
}

Matrix separation_composite(const StateSpaceModel& model, const Matrix& k, const Matrix& kf) {
    const auto n = model.states();
    const Matrix& a = model.a();
    const Matrix bk = model.b() * k;
    const Matrix kfc = kf * model.c();
    Matrix m(2 * n, 2 * n);
    m << a, -bk, kfc, a - bk - kfc;
    return m;
}

}  // namespace pitchstab
