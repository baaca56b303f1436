#include "pitchstab/kalman.hpp"

#include "pitchstab/errors.hpp"
#include "riccati_iteration.hpp"

#include <algorithm>
#include <string>

namespace pitchstab {

namespace {

void check_symmetric(const Matrix& m, const char* name) {
    if (!m.allFinite()) throw ValidationError(std::string(name) + ": entries must be finite");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ValidationError(std::string(name) + ": not symmetric");
}

Matrix filter_rhs(const StateSpaceModel& model, const CovariancePair& cov, const Matrix& p) {
    const Matrix& a = model.a();
    const Matrix& c = model.c();
    const Matrix s = cov.vn + c * p * c.transpose();
    const Matrix apc = a * p * c.transpose();
    return a * p * a.transpose() + cov.vd - apc * s.ldlt().solve(apc.transpose());
}

}  // namespace

void CovariancePair::validate(Eigen::Index n, Eigen::Index p) const {
    if (vd.rows() != n || vd.cols() != n)
        throw ValidationError("vd: expected " + std::to_string(n) + "x" + std::to_string(n));
    if (vn.rows() != p || vn.cols() != p)
        throw ValidationError("vn: expected " + std::to_string(p) + "x" + std::to_string(p));
    check_symmetric(vd, "vd");
    check_symmetric(vn, "vn");
    Eigen::SelfAdjointEigenSolver<Matrix> evd(vd);
    if (evd.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, vd.norm()))
        throw ValidationError("vd: not positive semidefinite");
    Eigen::LLT<Matrix> llt(vn);
    if (llt.info() != Eigen::Success) throw ValidationError("vn: not positive definite");
    Eigen::SelfAdjointEigenSolver<Matrix> evn(vn);
    if (!(evn.eigenvalues().minCoeff() > 0.0)) throw ValidationError("vn: not positive definite");
}

CovariancePair default_covariances(double vn22) {
    Matrix vn = Matrix::Zero(2, 2);
    vn(0, 0) = 1e-6;
    vn(1, 1) = vn22;
    return {Matrix::Identity(2, 2), vn};
}

Matrix solve_filter_riccati(const StateSpaceModel& model, const CovariancePair& cov, const RiccatiOptions& opt,
                            int* iterations) {
    cov.validate(model.states(), model.outputs());
    return detail::riccati_fixed_point(
        cov.vd, [&](const Matrix& x) { return filter_rhs(model, cov, x); }, opt, iterations, "filter");
}

double filter_riccati_residual(const StateSpaceModel& model, const CovariancePair& cov, const Matrix& p) {
    return (filter_rhs(model, cov, p) - p).norm();
}

Matrix filter_gain(const StateSpaceModel& model, const Matrix& p_riccati, const Matrix& vn) {
    const Matrix& c = model.c();
    const Matrix s = vn + c * p_riccati * c.transpose();
    // Kf = A P C' S^-1, computed as (S'^-1 (A P C')')'
    Eigen::FullPivLU<Matrix> lu(s.transpose());
    if (!lu.isInvertible()) throw NumericalError("innovation covariance Vn + C P C' is singular");
    const Matrix apc = model.a() * p_riccati * c.transpose();
    return lu.solve(apc.transpose()).transpose();
}

FilterDesign design_filter(const StateSpaceModel& model, const CovariancePair& cov) {
    FilterDesign d;
    d.p_riccati = solve_filter_riccati(model, cov, {}, &d.iterations);
    d.residual = filter_riccati_residual(model, cov, d.p_riccati);
    if (!(d.residual < kRiccatiResidualLimit))
        throw NumericalError("filter Riccati residual " + std::to_string(d.residual) + " exceeds 1e-9");
    d.kf = filter_gain(model, d.p_riccati, cov.vn);
    d.closed_loop_radius = spectral_radius(model.a() - d.kf * model.c());
    if (!(d.closed_loop_radius < 1.0)) throw NumericalError("estimator A - Kf C is not Schur stable");
    return d;
}

Vector filter_step(const Matrix& kf, const StateSpaceModel& model, const Vector& x_hat, const Vector& u,
                   const Vector& y) {
    if (!x_hat.allFinite() || !u.allFinite() || !y.allFinite())
        throw ValidationError("filter_step: non-finite input");
    if (y.size() != model.outputs()) throw ValidationError("filter_step: measurement dimension mismatch");
    return step(model, x_hat, u) + kf * (y - model.c() * x_hat);
}

}  // namespace pitchstab
