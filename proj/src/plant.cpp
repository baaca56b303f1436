#include "pitchstab/plant.hpp"

#include "pitchstab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace pitchstab {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

using State3 = std::array<double, 3>;

State3 derivative(const NonlinearParams& p, const State3& s, double u, double bias) {
    const double theta = s[0];
    const double limit = p.support * p.edge_deg;
    const double restoring = std::clamp(p.support * theta, -limit, limit);
    return {p.rate_scale * s[1],
            p.toppling * kDeg * std::sin(theta / kDeg) - restoring - p.damping * s[1] + p.servo_gain * s[2] + bias,
            (u - s[2]) / p.servo_time_constant};
}

State3 axpy(const State3& x, double h, const State3& k) { return {x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2]}; }

void check_finite(const PlantState& s) {
    if (!std::isfinite(s.theta) || !std::isfinite(s.theta_dot) || !std::isfinite(s.servo) ||
        std::abs(s.theta) > kDivergenceBound || std::abs(s.theta_dot) > kDivergenceBound)
        throw NumericalError("plant state diverged");
}

}  // namespace

void NonlinearParams::validate() const {
    auto pos = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError(std::string("plant.nonlinear.") + name + ": must be positive");
    };
    auto nonneg = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ValidationError(std::string("plant.nonlinear.") + name + ": must be nonnegative");
    };
    pos(rate_scale, "rate_scale");
    nonneg(toppling, "toppling");
    nonneg(support, "support");
    pos(edge_deg, "edge_deg");
    nonneg(damping, "damping");
    if (!std::isfinite(servo_gain)) throw ValidationError("plant.nonlinear.servo_gain: must be finite");
    pos(servo_time_constant, "servo_time_constant");
}

void PlantConfig::validate() const {
    if (mode == PlantMode::Nonlinear) nonlinear.validate();
    if (!(gyro_noise_std >= 0.0) || !std::isfinite(gyro_noise_std))
        throw ValidationError("plant.gyro_noise_std: must be nonnegative");
    if (!(inertia_proxy > 0.0) || !std::isfinite(inertia_proxy))
        throw ValidationError("plant.inertia_proxy: must be positive");
    if (model.states() != 2 || model.inputs() != 1 || model.outputs() != 2)
        throw ValidationError("model: the pitch plant needs n=2, m=1, p=2");
}

void DisturbanceEvent::validate(const std::string& field) const {
    if (!(at_time >= 0.0) || !std::isfinite(at_time)) throw ValidationError(field + ".at_s: must be nonnegative");
    if (direction != 1.0 && direction != -1.0) throw ValidationError(field + ".direction: must be +1 or -1");
    if (kind == DisturbanceKind::Impulse) {
        if (!(energy >= 0.0) || !std::isfinite(energy)) throw ValidationError(field + ".energy_j: must be nonnegative");
        if (!(efficiency > 0.0 && efficiency <= 1.0)) throw ValidationError(field + ".efficiency: must be in (0, 1]");
    } else {
        if (!(bias >= 0.0) || !std::isfinite(bias)) throw ValidationError(field + ".bias: must be nonnegative");
        if (!(duration > 0.0) || !std::isfinite(duration)) throw ValidationError(field + ".duration_s: must be positive");
    }
}

void DisturbanceEvent::set_magnitude(double m) {
    if (kind == DisturbanceKind::Impulse)
        energy = m;
    else
        bias = m;
}

PlantState plant_step(const PlantConfig& config, const PlantState& state, double u, double dt, double bias) {
    PlantState next = state;
    if (config.mode == PlantMode::Linear) {
        const Matrix& a = config.model.a();
        const Matrix& b = config.model.b();
        Vector x(2);
        x << state.theta, state.theta_dot;
        const Vector xn = a * x + b * Vector::Constant(1, u);
        next.theta = xn(0);
        next.theta_dot = xn(1);
        if (bias != 0.0) next.theta_dot += bias * dt;
    } else {
        const NonlinearParams& p = config.nonlinear;
        State3 s{state.theta, state.theta_dot, state.servo};
        constexpr int kSubsteps = 4;
        const double h = dt / kSubsteps;
        for (int i = 0; i < kSubsteps; ++i) {
            const State3 k1 = derivative(p, s, u, bias);
            const State3 k2 = derivative(p, axpy(s, h / 2.0, k1), u, bias);
            const State3 k3 = derivative(p, axpy(s, h / 2.0, k2), u, bias);
            const State3 k4 = derivative(p, axpy(s, h, k3), u, bias);
            for (int j = 0; j < 3; ++j) s[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        next = {s[0], s[1], s[2]};
    }
    check_finite(next);
    return next;
}

double impulse_velocity_change(const DisturbanceEvent& event, double inertia_proxy) {
    if (event.kind != DisturbanceKind::Impulse || event.energy == 0.0) return 0.0;
    return event.direction * std::sqrt(2.0 * event.efficiency * event.energy / inertia_proxy);
}

PlantState inject_disturbance(const DisturbanceEvent& event, const PlantState& state, double inertia_proxy) {
    PlantState next = state;
    next.theta_dot += impulse_velocity_change(event, inertia_proxy);
    return next;
}

Measurement sense(const PlantState& state, double gyro_noise_std, std::mt19937_64& rng) {
    Measurement m{state.theta, state.theta_dot};
    if (gyro_noise_std > 0.0) {
        std::normal_distribution<double> noise(0.0, gyro_noise_std);
        m.theta_dot += noise(rng);
    }
    return m;
}

double pendulum_kinetic_energy(double mass, double length, double amplitude_deg) {
    if (!(mass > 0.0) || !(length > 0.0)) throw ValidationError("pendulum mass and length must be positive");
    return mass * kGravity * length * (1.0 - std::cos(amplitude_deg / kDeg));
}

PlantState apply_step(const PlantState& state, double amplitude_x, double z_com) {
    PlantState next = state;
    next.theta = std::asin(std::clamp(-amplitude_x / z_com, -1.0, 1.0)) * kDeg;
    return next;
}

}  // namespace pitchstab
