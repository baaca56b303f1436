#pragma once

#include "pitchstab/statespace.hpp"

#include <cstdint>
#include <random>

namespace pitchstab {

enum class PlantMode { Linear, Nonlinear };

// Nonlinear pitch dynamics in the model's sensor-native units (theta in degrees,
// theta_dot in gyro units, servo angle in degrees):
//
//   dtheta/dt     = rate_scale * theta_dot
//   dtheta_dot/dt = toppling * deg(sin(theta)) - sat(support * theta, support * edge)
//                   - damping * theta_dot + servo_gain * servo + bias
//   dservo/dt     = (u - servo) / servo_time_constant
//
// The support term is the foot's restoring moment, capped once the centre of
// pressure reaches the foot edge. Below the edge the linearization reproduces the
// continuous-time equivalent of the identified model; above it gravity wins.
struct NonlinearParams {
    double rate_scale = 0.9306;
    double toppling = 54.12;
    double support = 80.0;
    double edge_deg = 12.0;
    double damping = 5.0714;
    double servo_gain = 62.763;
    double servo_time_constant = 0.05;  // s

    void validate() const;
    bool operator==(const NonlinearParams&) const = default;
};

struct PlantConfig {
    PlantMode mode = PlantMode::Linear;
    StateSpaceModel model = identified_pitch_model();
    NonlinearParams nonlinear;
    double gyro_noise_std = 0.0;
    double inertia_proxy = 5e-6;  // impulse energy -> velocity conversion

    void validate() const;
};

struct PlantState {
    double theta = 0.0;
    double theta_dot = 0.0;
    double servo = 0.0;  // nonlinear mode only
};

enum class DisturbanceKind { Impulse, Constant };

struct DisturbanceEvent {
    DisturbanceKind kind = DisturbanceKind::Impulse;
    double at_time = 0.0;     // s
    double direction = 1.0;   // +1 or -1
    double energy = 0.0;      // J, impulse
    double efficiency = 0.5;  // impulse transfer efficiency, (0, 1]
    double bias = 0.0;        // constant: angular acceleration bias, native units per s
    double duration = 0.0;    // constant: s

    void validate(const std::string& field) const;
    double magnitude() const { return kind == DisturbanceKind::Impulse ? energy : bias; }
    void set_magnitude(double m);
    bool operator==(const DisturbanceEvent&) const = default;
};

// Advances the true state by dt. Linear mode is the exact model step, with `bias`
// entering theta_dot as bias * dt. Nonlinear mode uses RK4 with 4 substeps.
PlantState plant_step(const PlantConfig& config, const PlantState& state, double u, double dt, double bias = 0.0);

// Impulse: theta_dot += direction * sqrt(2 * efficiency * energy / inertia_proxy).
// Constant events do not touch the state; their bias goes to plant_step.
PlantState inject_disturbance(const DisturbanceEvent& event, const PlantState& state, double inertia_proxy);

double impulse_velocity_change(const DisturbanceEvent& event, double inertia_proxy);

struct Measurement {
    double theta = 0.0;
    double theta_dot = 0.0;
};

// theta passes through, theta_dot gets zero-mean Gaussian noise.
Measurement sense(const PlantState& state, double gyro_noise_std, std::mt19937_64& rng);

// m g L (1 - cos(amplitude)), g = 9.81.
double pendulum_kinetic_energy(double mass, double length, double amplitude_deg);

// Stepping surrogate: the new pivot sits amplitude_x ahead of the CoM, so the CoM
// offset relative to it becomes -amplitude_x. Velocity is kept.
PlantState apply_step(const PlantState& state, double amplitude_x, double z_com);

inline constexpr double kGravity = 9.81;

}  // namespace pitchstab
