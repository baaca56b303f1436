#include "pitchstab/sysid.hpp"

#include "pitchstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pitchstab {

RegressionSystem build_regression(const TimeSeries& data, Eigen::Index n) {
    data.validate();
    if (n <= 0) throw ValidationError("order: must be positive");
    const auto m = data.inputs.front().size();
    const auto len = static_cast<Eigen::Index>(data.size());
    if (len < n + m + 1)
        throw ValidationError("time series too short: " + std::to_string(len) + " samples, need at least " +
                              std::to_string(n + m + 1));
    RegressionSystem rs;
    rs.psi.resize(len - 1, n + m);
    rs.y.resize(len - 1, n);
    for (Eigen::Index k = 0; k < len; ++k) {
        const auto& x = data.outputs[static_cast<std::size_t>(k)];
        const auto& u = data.inputs[static_cast<std::size_t>(k)];
        if (x.size() != n)
            throw ValidationError("outputs[" + std::to_string(k) + "]: expected " + std::to_string(n) +
                                  " full-state entries, got " + std::to_string(x.size()));
        if (u.size() != m)
            throw ValidationError("inputs[" + std::to_string(k) + "]: expected " + std::to_string(m) + " entries");
        if (k + 1 < len) {
            rs.psi.row(k).head(n) = x.transpose();
            rs.psi.row(k).tail(m) = u.transpose();
        }
        if (k > 0) rs.y.row(k - 1) = x.transpose();
    }
    return rs;
}

IdentificationResult identify(const TimeSeries& data, Eigen::Index n) {
    const RegressionSystem rs = build_regression(data, n);
    const auto m = rs.psi.cols() - n;

    Eigen::JacobiSVD<Matrix> svd(rs.psi);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    const double rcond = smax > 0.0 ? (smin / smax) * (smin / smax) : 0.0;
    if (!(rcond >= kMinReciprocalCondition))
        throw NumericalError("insufficient excitation: reciprocal condition of psi^T psi is " +
                             std::to_string(rcond));

    const Matrix theta = rs.psi.colPivHouseholderQr().solve(rs.y);
    Matrix a = theta.topRows(n).transpose();
    Matrix b = theta.bottomRows(m).transpose();
    const Matrix e = rs.y - rs.psi * theta;
    Vector rms = (e.colwise().squaredNorm() / static_cast<double>(e.rows())).cwiseSqrt().transpose();
    return {StateSpaceModel(a, b, Matrix::Identity(n, n), data.sample_rate), rms, rcond};
}

double vaf(const std::vector<Vector>& measured, const std::vector<Vector>& estimated) {
    if (measured.size() != estimated.size())
        throw ValidationError("vaf: sequences differ in length");
    if (measured.empty()) throw ValidationError("vaf: empty sequence");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < measured.size(); ++k) {
        if (measured[k].size() != estimated[k].size())
            throw ValidationError("vaf: sample " + std::to_string(k) + " differs in dimension");
        num += (measured[k] - estimated[k]).squaredNorm();
        den += measured[k].squaredNorm();
    }
    if (den == 0.0) throw ValidationError("vaf: measured sequence is identically zero");
    return std::max(0.0, (1.0 - num / den) * 100.0);
}

double vaf(const std::vector<double>& measured, const std::vector<double>& estimated) {
    std::vector<Vector> a;
    std::vector<Vector> b;
    a.reserve(measured.size());
    b.reserve(estimated.size());
    for (double v : measured) a.push_back(Vector::Constant(1, v));
    for (double v : estimated) b.push_back(Vector::Constant(1, v));
    return vaf(a, b);
}

}  // namespace pitchstab
