#include "pitchstab/errors.hpp"
#include "pitchstab/plant.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

using namespace pitchstab;

namespace {

PlantConfig nonlinear() {
    PlantConfig c;
    c.mode = PlantMode::Nonlinear;
    return c;
}

}  // namespace

TEST(PlantStep, LinearModeIsModelStep) {
    PlantConfig c;
    const PlantState s{3.0, -1.5, 0.0};
    const PlantState n = plant_step(c, s, 2.0, c.model.dt());
    Vector x(2);
    x << 3.0, -1.5;
    const Vector ref = step(c.model, x, Vector::Constant(1, 2.0));
    EXPECT_EQ(n.theta, ref(0));
    EXPECT_EQ(n.theta_dot, ref(1));
}

TEST(PlantStep, NonlinearEquilibrium) {
    const auto c = nonlinear();
    PlantState s;
    for (int i = 0; i < 200; ++i) s = plant_step(c, s, 0.0, c.model.dt());
    EXPECT_EQ(s.theta, 0.0);
    EXPECT_EQ(s.theta_dot, 0.0);
    EXPECT_EQ(s.servo, 0.0);
}

TEST(PlantStep, SmallAngleMatchesLinearization) {
    const auto c = nonlinear();
    const auto& p = c.nonlinear;
    // Linearized continuous dynamics, exact discretization by the matrix exponential.
    Matrix a(4, 4);
    a << 0, p.rate_scale, 0, 0,
        p.toppling - p.support, -p.damping, p.servo_gain, 0,
        0, 0, -1 / p.servo_time_constant, 1 / p.servo_time_constant,
        0, 0, 0, 0;
    const double dt = c.model.dt();
    const Matrix phi = (a * dt).exp();
    for (const double u : {0.0, 0.05, -0.08}) {
        Eigen::Vector4d z(1.5, 0.0, 0.0, u);
        PlantState s{1.5, 0.0, 0.0};
        double worst = 0.0, scale = 0.0;
        const int n = static_cast<int>(std::ceil(1.0 / dt));
        for (int k = 0; k < n; ++k) {
            s = plant_step(c, s, u, dt);
            z = phi * z;
            worst = std::max(worst, std::abs(s.theta - z(0)));
            scale = std::max(scale, std::abs(z(0)));
            ASSERT_LT(std::abs(s.theta), 2.0);
        }
        EXPECT_LT(worst, 0.01 * scale) << "u=" << u;
    }
}

TEST(PlantStep, SmallLeanRecoversLargeLeanTopples) {
    const auto c = nonlinear();
    PlantState s{5.0, 0.0, 0.0};
    for (int i = 0; i < 400; ++i) s = plant_step(c, s, 0.0, c.model.dt());
    EXPECT_LT(std::abs(s.theta), 0.1);
    s = {25.0, 0.0, 0.0};
    for (int i = 0; i < 100 && std::abs(s.theta) < 90; ++i) s = plant_step(c, s, 0.0, c.model.dt());
    EXPECT_GT(std::abs(s.theta), 45.0);
}

TEST(PlantStep, ConstantBiasShiftsLinearVelocity) {
    PlantConfig c;
    const auto n = plant_step(c, {}, 0.0, 0.1, 3.0);
    EXPECT_DOUBLE_EQ(n.theta_dot, 0.3);
}

TEST(InjectDisturbance, Examples) {
    DisturbanceEvent e;
    e.energy = 0.0;
    const PlantState s{1, 2, 3};
    const auto same = inject_disturbance(e, s, 5e-6);
    EXPECT_EQ(same.theta_dot, 2.0);

    e.energy = 0.5;
    e.efficiency = 1.0;
    EXPECT_DOUBLE_EQ(impulse_velocity_change(e, 1.0), 1.0);
    e.direction = -1;
    EXPECT_DOUBLE_EQ(inject_disturbance(e, {}, 1.0).theta_dot, -1.0);

    e.direction = 1;
    e.energy = 0.699;
    e.efficiency = 0.5;
    EXPECT_DOUBLE_EQ(impulse_velocity_change(e, 5e-6), std::sqrt(2 * 0.5 * 0.699 / 5e-6));
    EXPECT_EQ(inject_disturbance(e, s, 5e-6).theta, 1.0);

    DisturbanceEvent k;
    k.kind = DisturbanceKind::Constant;
    k.bias = 10;
    k.duration = 1;
    EXPECT_EQ(inject_disturbance(k, s, 5e-6).theta_dot, 2.0);
}

TEST(InjectDisturbance, Validation) {
    DisturbanceEvent e;
    e.efficiency = 0;
    EXPECT_THROW(e.validate("disturbances[0]"), ValidationError);
    e = {};
    e.direction = 0.5;
    EXPECT_THROW(e.validate("disturbances[0]"), ValidationError);
    e = {};
    e.kind = DisturbanceKind::Constant;
    e.bias = 1;
    EXPECT_THROW(e.validate("disturbances[0]"), ValidationError);  // zero duration
}

TEST(Sense, NoiseFreeIsIdentity) {
    std::mt19937_64 rng(1);
    const auto m = sense({1.25, -3.5, 0}, 0.0, rng);
    EXPECT_EQ(m.theta, 1.25);
    EXPECT_EQ(m.theta_dot, -3.5);
}

TEST(Sense, DeterministicForSeed) {
    std::mt19937_64 a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        const auto x = sense({0, 0, 0}, 0.3, a);
        const auto y = sense({0, 0, 0}, 0.3, b);
        EXPECT_EQ(x.theta_dot, y.theta_dot);
        EXPECT_EQ(x.theta, 0.0);
    }
}

TEST(Sense, NoiseStandardDeviation) {
    std::mt19937_64 rng(2);
    const int n = 100000;
    double s1 = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double v = sense({0, 1.0, 0}, 0.3, rng).theta_dot - 1.0;
        s1 += v;
        s2 += v * v;
    }
    const double mean = s1 / n;
    const double sd = std::sqrt(s2 / n - mean * mean);
    EXPECT_NEAR(sd, 0.3, 0.02 * 0.3);
}

TEST(KineticEnergy, PendulumTable) {
    const double expected[] = {0.645, 0.699, 0.755, 0.813, 0.873, 0.935};
    for (int i = 0; i < 6; ++i)
        EXPECT_NEAR(pendulum_kinetic_energy(0.76, 1.0, 24 + i), expected[i], 1e-3) << 24 + i << " deg";
    EXPECT_EQ(pendulum_kinetic_energy(3.0, 2.0, 0.0), 0.0);
    EXPECT_THROW(pendulum_kinetic_energy(0.0, 1.0, 10.0), ValidationError);
}

TEST(ApplyStep, PivotMovesAheadOfCom) {
    const PlantState s{10.0, 4.0, 1.0};
    const auto n = apply_step(s, 0.03, 0.25);
    EXPECT_NEAR(n.theta, -std::asin(0.12) * 180 / std::numbers::pi, 1e-12);
    EXPECT_EQ(n.theta_dot, 4.0);
    EXPECT_EQ(n.servo, 1.0);
    EXPECT_EQ(apply_step(s, 0.0, 0.25).theta, 0.0);
}
