#include "pitchstab/statespace.hpp"

#include "pitchstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pitchstab {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

std::string dims(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

StateSpaceModel::StateSpaceModel(Matrix a, Matrix b, Matrix c, double sample_rate_hz)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), sample_rate_(sample_rate_hz) {
    if (a_.rows() == 0 || a_.rows() != a_.cols())
        throw ValidationError("a: must be square and nonempty, got " + dims(a_));
    if (b_.rows() != a_.rows() || b_.cols() == 0)
        throw ValidationError("b: expected " + std::to_string(a_.rows()) + " rows, got " + dims(b_));
    if (c_.cols() != a_.rows() || c_.rows() == 0)
        throw ValidationError("c: expected " + std::to_string(a_.rows()) + " columns, got " + dims(c_));
    if (!all_finite(a_) || !all_finite(b_) || !all_finite(c_))
        throw ValidationError("model matrices must be finite");
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_))
        throw ValidationError("sample_rate_hz: must be positive");
}

bool StateSpaceModel::operator==(const StateSpaceModel& other) const {
    return a_ == other.a_ && b_ == other.b_ && c_ == other.c_ && sample_rate_ == other.sample_rate_;
}

StateSpaceModel identified_pitch_model() {
    Matrix a(2, 2);
    a << 0.995, 0.021, -0.584, 0.879;
    Matrix b(2, 1);
    b << 0.013, 1.416;
    return StateSpaceModel(a, b, Matrix::Identity(2, 2), 41.664);
}

void TimeSeries::validate() const {
    if (!(sample_rate > 0.0)) throw ValidationError("sample_rate: must be positive");
    if (inputs.size() != outputs.size())
        throw ValidationError("inputs and outputs differ in length (" + std::to_string(inputs.size()) +
                              " vs " + std::to_string(outputs.size()) + ")");
    if (outputs.size() < 2) throw ValidationError("time series needs at least 2 samples");
}

Vector step(const StateSpaceModel& model, const Vector& x, const Vector& u) {
    if (x.size() != model.states())
        throw ValidationError("state has " + std::to_string(x.size()) + " entries, model expects " +
                              std::to_string(model.states()));
    if (u.size() != model.inputs())
        throw ValidationError("input has " + std::to_string(u.size()) + " entries, model expects " +
                              std::to_string(model.inputs()));
    return model.a() * x + model.b() * u;
}

TimeSeries simulate(const StateSpaceModel& model, const Vector& x0, const std::vector<Vector>& u_seq) {
    if (u_seq.empty()) throw ValidationError("u_seq: must be nonempty");
    TimeSeries ts;
    ts.sample_rate = model.sample_rate();
    ts.inputs = u_seq;
    ts.outputs.reserve(u_seq.size());
    Vector x = x0;
    for (std::size_t k = 0; k < u_seq.size(); ++k) {
        ts.outputs.push_back(model.c() * x);
        if (k + 1 == u_seq.size()) break;
        x = step(model, x, u_seq[k]);
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceBound)
            throw NumericalError("simulation diverged at step " + std::to_string(k + 1));
    }
    return ts;
}

Matrix dc_gain(const StateSpaceModel& model) {
    const auto n = model.states();
    Matrix m = Matrix::Identity(n, n) - model.a();
    Eigen::FullPivLU<Matrix> lu(m);
    if (!lu.isInvertible())
        throw NumericalError("I - A is singular: integrating plant has no finite DC gain");
    return model.c() * lu.solve(model.b());
}

double spectral_radius(const Matrix& m) {
    if (m.rows() != m.cols()) throw ValidationError("spectral_radius: matrix must be square");
    if (m.rows() == 0) return 0.0;
    if (m.rows() == 1) return std::abs(m(0, 0));
    if (m.rows() == 2) {
        // roots of l^2 - tr l + det
        const double tr = m(0, 0) + m(1, 1);
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        const double disc = tr * tr / 4.0 - det;
        if (disc < 0.0) return std::sqrt(det);
        const double s = std::sqrt(disc);
        return std::max(std::abs(tr / 2.0 + s), std::abs(tr / 2.0 - s));
    }
    Eigen::EigenSolver<Matrix> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace pitchstab
