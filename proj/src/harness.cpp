#include "pitchstab/harness.hpp"

#include "pitchstab/batch.hpp"
#include "pitchstab/errors.hpp"
#include "pitchstab/kalman.hpp"
#include "pitchstab/lqr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace pitchstab {

const char* to_string(ControllerMode m) {
    switch (m) {
        case ControllerMode::None: return "none";
        case ControllerMode::LqrFixed: return "lqr_fixed";
        case ControllerMode::LqrFuzzy: return "lqr_fuzzy";
    }
    return "?";
}

const char* to_string(Outcome o) { return o == Outcome::Stood ? "stood" : "fell"; }

void ScenarioConfig::validate() const {
    plant.validate();
    if (!(duration > 0.0) || !std::isfinite(duration)) throw ValidationError("duration_s: must be positive");
    if (!std::isfinite(theta0) || !std::isfinite(theta_dot0))
        throw ValidationError("initial_state: entries must be finite");
    if (!(fall_threshold > 0.0)) throw ValidationError("fall_threshold_deg: must be positive");
    if (std::abs(theta0) > fall_threshold) throw ValidationError("initial_state[0]: beyond fall_threshold_deg");
    if (!(u_limit >= 0.0)) throw ValidationError("u_limit_deg: must be nonnegative");
    if (!std::isfinite(neutral)) throw ValidationError("neutral_deg: must be finite");
    if (!(q11 >= 0.0) || !std::isfinite(q11)) throw ValidationError("q11: must be nonnegative");
    if (!(vn22 > 0.0) || !std::isfinite(vn22)) throw ValidationError("vn22: must be positive");
    if (controller == ControllerMode::LqrFuzzy) fuzzy.validate();
    capture.params.validate();
    if (!(capture.support_threshold > 0.0)) throw ValidationError("capture_point.support_threshold: must be positive");
    if (!(capture.max_step > 0.0)) throw ValidationError("capture_point.max_step: must be positive");
    if (!(capture.step_period >= 0.0)) throw ValidationError("capture_point.step_period_s: must be nonnegative");
    for (std::size_t i = 0; i < disturbances.size(); ++i)
        disturbances[i].validate("disturbances[" + std::to_string(i) + "]");
    if (tolerance) {
        const auto& s = *tolerance;
        if (s.event >= disturbances.size()) throw ValidationError("tolerance.event: no such disturbance");
        if (!(s.lo >= 0.0) || !(s.hi > s.lo)) throw ValidationError("tolerance: need 0 <= lo < hi");
        if (!(s.resolution > 0.0)) throw ValidationError("tolerance.resolution: must be positive");
        if (s.trials < 1) throw ValidationError("tolerance.trials: must be at least 1");
        if (!(s.pass_fraction > 0.0 && s.pass_fraction <= 1.0))
            throw ValidationError("tolerance.pass_fraction: must be in (0, 1]");
    }
}

SimTrace run_scenario(const ScenarioConfig& config) {
    config.validate();
    const StateSpaceModel& model = config.plant.model;
    const double dt = model.dt();
    const double fs = model.sample_rate();
    const auto n_steps = static_cast<long>(std::llround(config.duration * fs));

    const FilterDesign filter = design_filter(model, default_covariances(config.vn22));
    fuzzy::Gains fixed{};
    if (config.controller == ControllerMode::LqrFixed) {
        const ControlDesign lqr = design_lqr(model, default_costs(config.q11));
        fixed = {lqr.k(0, 0), lqr.k(0, 1)};
    }
    std::optional<fuzzy::GainScheduler> scheduler;
    if (config.controller == ControllerMode::LqrFuzzy) scheduler.emplace(config.fuzzy);

    std::mt19937_64 rng(config.seed);
    PlantState x{config.theta0, config.theta_dot0, 0.0};
    Vector x_hat(2);
    x_hat << config.theta0, config.theta_dot0;
    CapturePointState cp_state;
    double last_step = -std::numeric_limits<double>::infinity();

    struct Window {
        long start;
        long end;
        double bias;
    };
    std::vector<Window> constants;
    std::vector<std::pair<long, const DisturbanceEvent*>> impulses;
    for (const auto& ev : config.disturbances) {
        const long k0 = std::lround(ev.at_time * fs);
        if (ev.kind == DisturbanceKind::Impulse)
            impulses.emplace_back(k0, &ev);
        else
            constants.push_back({k0, std::lround((ev.at_time + ev.duration) * fs), ev.direction * ev.bias});
    }

    SimTrace trace;
    trace.records.reserve(static_cast<std::size_t>(n_steps));
    for (long k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        bool disturbed = false;
        for (const auto& [ki, ev] : impulses) {
            if (ki != k) continue;
            x = inject_disturbance(*ev, x, config.plant.inertia_proxy);
            disturbed = true;
        }
        double bias = 0.0;
        for (const auto& w : constants) {
            if (k >= w.start && k < w.end) {
                bias += w.bias;
                disturbed = true;
            }
        }
        if (disturbed && !trace.onset) trace.onset = t;

        const Measurement y = sense(x, config.plant.gyro_noise_std, rng);

        fuzzy::Gains gains{};
        if (config.controller == ControllerMode::LqrFixed)
            gains = fixed;
        else if (scheduler)
            gains = scheduler->schedule(x_hat(0), x_hat(1));
        Matrix k_row(1, 2);
        k_row << gains.k_theta, gains.k_theta_dot;
        const double u = control_law(k_row, x_hat, config.u_limit)(0);

        const CapturePointResult cp = capture_point_step(cp_state, config.capture.params, x_hat(1));
        cp_state = cp.state;
        StepCommand cmd;
        if (config.capture.enabled)
            cmd = stepping_command(cp.x_cp, config.capture.support_threshold, config.capture.max_step);

        trace.records.push_back({t, x.theta, x.theta_dot, y.theta, y.theta_dot, x_hat(0), x_hat(1),
                                 config.neutral + u, gains.k_theta, gains.k_theta_dot, cp.x_cp, cmd.active,
                                 disturbed});

        Vector y_vec(2);
        y_vec << y.theta, y.theta_dot;
        x_hat = filter_step(filter, model, x_hat, Vector::Constant(1, u), y_vec);

        if (cmd.active && t - last_step >= config.capture.step_period) {
            x = apply_step(x, cmd.amplitude_x, config.capture.params.z_com);
            last_step = t;
            ++trace.steps_taken;
        }
        x = plant_step(config.plant, x, u, dt, bias);
        if (std::abs(x.theta) > config.fall_threshold) {
            trace.outcome = Outcome::Fell;
            break;
        }
    }
    return trace;
}

TransientMetrics transient_metrics(const std::vector<double>& t, const std::vector<double>& y, double onset,
                                   double settle_band) {
    if (t.size() != y.size()) throw ValidationError("transient_metrics: t and y differ in length");
    if (y.size() < 2) throw ValidationError("transient_metrics: need at least 2 samples");
    TransientMetrics m;
    const std::size_t n = y.size();
    const std::size_t tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(n))));
    double sum = 0.0;
    for (std::size_t i = n - tail; i < n; ++i) sum += y[i];
    const double fin = sum / static_cast<double>(tail);
    m.final_value = fin;
    m.steady_state_error = std::abs(fin);

    std::size_t first = 0;
    while (first < n && t[first] < onset) ++first;
    if (first == n) return m;

    std::size_t ext = first;
    for (std::size_t i = first; i < n; ++i)
        if (std::abs(y[i] - fin) > std::abs(y[ext] - fin)) ext = i;
    m.extremum = y[ext];
    const double span = fin - y[ext];
    m.robustness_delta = std::abs(span);
    if (span == 0.0) return m;
    const double dir = span > 0.0 ? 1.0 : -1.0;

    auto crossing = [&](double frac) -> std::optional<double> {
        const double level = y[ext] + frac * span;
        for (std::size_t i = ext; i < n; ++i)
            if ((y[i] - level) * dir >= 0.0) return t[i];
        return std::nullopt;
    };
    const auto t10 = crossing(0.1);
    const auto t90 = crossing(0.9);
    if (t10 && t90) m.rise_time = *t90 - *t10;

    double os = 0.0;
    for (std::size_t i = ext; i < n; ++i) os = std::max(os, (y[i] - fin) * dir);
    m.max_overshoot = os;

    const double band = settle_band * std::abs(span);
    std::optional<std::size_t> last_out;
    for (std::size_t i = first; i < n; ++i)
        if (std::abs(y[i] - fin) > band) last_out = i;
    if (!last_out)
        m.settling_time = t[first] - onset;
    else if (*last_out + 1 < n)
        m.settling_time = t[*last_out + 1] - onset;
    return m;
}

TransientMetrics transient_metrics(const SimTrace& trace, double settle_band) {
    std::vector<double> t;
    std::vector<double> y;
    t.reserve(trace.records.size());
    y.reserve(trace.records.size());
    for (const auto& r : trace.records) {
        t.push_back(r.t);
        y.push_back(r.theta_true);
    }
    if (t.empty()) throw ValidationError("transient_metrics: empty trace");
    return transient_metrics(t, y, trace.onset.value_or(t.front()), settle_band);
}

ToleranceResult tolerance_search(const ScenarioConfig& base, const ToleranceSpec& spec) {
    ScenarioConfig check = base;
    check.tolerance = spec;
    check.validate();

    ToleranceResult res;
    auto passes = [&](double level) {
        std::vector<ScenarioConfig> batch(static_cast<std::size_t>(spec.trials), base);
        for (int i = 0; i < spec.trials; ++i) {
            auto& c = batch[static_cast<std::size_t>(i)];
            c.seed = base.seed + static_cast<std::uint64_t>(i);
            c.disturbances[spec.event].set_magnitude(level);
        }
        const auto traces = run_batch(batch);
        res.scenario_runs += spec.trials;
        const auto stood = std::count_if(traces.begin(), traces.end(),
                                         [](const SimTrace& tr) { return tr.outcome == Outcome::Stood; });
        return static_cast<double>(stood) >= spec.pass_fraction * spec.trials - 1e-9;
    };

    if (!passes(spec.lo)) {
        res.bottom_failed = true;
        return res;
    }
    double lo = spec.lo;
    double hi = spec.hi;
    while (hi - lo > spec.resolution) {
        const double mid = 0.5 * (lo + hi);
        if (passes(mid))
            lo = mid;
        else
            hi = mid;
        ++res.bisection_steps;
    }
    res.tolerated = lo;
    return res;
}

}  // namespace pitchstab
