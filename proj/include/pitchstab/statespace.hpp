#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace pitchstab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Discrete-time LTI model x[k+1] = A x[k] + B u[k], y[k] = C x[k].
//
// For the shipped pitch model the state is (theta, theta_dot): theta in degrees,
// theta_dot in the gyro's native units (labelled rad/s). Identification absorbs
// the cross-unit scaling into A and B, so the model runs on sensor-native units.
class StateSpaceModel {
public:
    StateSpaceModel(Matrix a, Matrix b, Matrix c, double sample_rate_hz);

    const Matrix& a() const { return a_; }
    const Matrix& b() const { return b_; }
    const Matrix& c() const { return c_; }
    double sample_rate() const { return sample_rate_; }
    double dt() const { return 1.0 / sample_rate_; }

    Eigen::Index states() const { return a_.rows(); }
    Eigen::Index inputs() const { return b_.cols(); }
    Eigen::Index outputs() const { return c_.rows(); }

    bool operator==(const StateSpaceModel& other) const;

private:
    Matrix a_;
    Matrix b_;
    Matrix c_;
    double sample_rate_;
};

// The identified pitch model (A, B, C, 41.664 Hz) the controller is designed on.
StateSpaceModel identified_pitch_model();

// Input/output record sampled at a fixed rate. inputs[k] is the command applied
// at sample k, outputs[k] the measurement taken at sample k.
struct TimeSeries {
    double sample_rate = 0.0;
    std::vector<Vector> inputs;
    std::vector<Vector> outputs;

    std::size_t size() const { return outputs.size(); }
    void validate() const;
};

Vector step(const StateSpaceModel& model, const Vector& x, const Vector& u);

// Runs the model from x0 over u_seq; outputs[k] = C x[k], with x[0] = x0.
// Aborts with NumericalError once any state magnitude exceeds 1e9.
TimeSeries simulate(const StateSpaceModel& model, const Vector& x0, const std::vector<Vector>& u_seq);

// C (I - A)^-1 B. Throws NumericalError for an integrating plant.
Matrix dc_gain(const StateSpaceModel& model);

double spectral_radius(const Matrix& m);

inline constexpr double kDivergenceBound = 1e9;

}  // namespace pitchstab
