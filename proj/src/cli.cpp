#include "pitchstab/cli.hpp"

#include "pitchstab/batch.hpp"
#include "pitchstab/config.hpp"
#include "pitchstab/errors.hpp"
#include "pitchstab/fuzzy.hpp"
#include "pitchstab/harness.hpp"
#include "pitchstab/io.hpp"
#include "pitchstab/kalman.hpp"
#include "pitchstab/lqr.hpp"
#include "pitchstab/sysid.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace pitchstab::cli {

namespace {

using io::format_number;
using Json = config::Json;

std::string row_string(const Matrix& m, Eigen::Index r) {
    std::string s = "[";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c) s += ", ";
        s += format_number(m(r, c));
    }
    return s + "]";
}

std::string matrix_string(const Matrix& m) {
    if (m.rows() == 1) return row_string(m, 0);
    std::string s = "[";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (r) s += ", ";
        s += row_string(m, r);
    }
    return s + "]";
}

std::string vector_string(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_number(v[i]);
    }
    return s + "]";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ValidationError(path + ": cannot open for writing");
    f.precision(17);
    return f;
}

std::string opt_string(const std::optional<double>& v) { return v ? format_number(*v) : "-"; }

// Sets a dotted path such as "plant.gyro_noise_std" or "disturbances[0].energy_j".
void set_path(Json& root, const std::string& path, const Json& value) {
    Json* node = &root;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ValidationError("--param: empty path");
    for (std::size_t p = 0; p < parts.size(); ++p) {
        std::string key = parts[p];
        std::vector<std::size_t> indices;
        const auto br = key.find('[');
        if (br != std::string::npos) {
            std::string rest = key.substr(br);
            key = key.substr(0, br);
            while (!rest.empty()) {
                const auto close = rest.find(']');
                if (rest.front() != '[' || close == std::string::npos)
                    throw ValidationError("--param: malformed index in \"" + path + "\"");
                indices.push_back(static_cast<std::size_t>(std::stoul(rest.substr(1, close - 1))));
                rest = rest.substr(close + 1);
            }
        }
        if (!node->is_object()) throw ValidationError("--param " + path + ": \"" + key + "\" is not inside an object");
        node = &(*node)[key];
        for (auto i : indices) {
            if (!node->is_array() || i >= node->size())
                throw ValidationError("--param " + path + ": index " + std::to_string(i) + " out of range");
            node = &(*node)[i];
        }
        if (p + 1 == parts.size()) *node = value;
    }
}

Json parse_value(const std::string& token) {
    try {
        return Json::parse(token);
    } catch (const Json::parse_error&) {
        return Json(token);
    }
}

std::vector<std::string> split_values(const std::string& list) {
    std::vector<std::string> out;
    std::stringstream ss(list);
    std::string v;
    while (std::getline(ss, v, ',')) {
        const auto b = v.find_first_not_of(' ');
        const auto e = v.find_last_not_of(' ');
        if (b != std::string::npos) out.push_back(v.substr(b, e - b + 1));
    }
    if (out.empty()) throw ValidationError("--values: empty list");
    return out;
}

}  // namespace

CommandOutcome dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pitch-axis balance pipeline: identification, Kalman/LQR design, fuzzy gain scheduling, simulation"};
    app.name("pitchstab");
    app.require_subcommand(1);

    std::function<CommandOutcome()> action;

    // identify
    std::string data_path;
    std::string model_path = "models/identified.json";
    std::string out_path;
    int order = 2;
    auto* identify_cmd = app.add_subcommand("identify", "Least-squares model from a t,u,theta,theta_dot CSV");
    identify_cmd->add_option("--data", data_path, "Input CSV")->required();
    identify_cmd->add_option("--order", order, "State dimension")->capture_default_str();
    identify_cmd->add_option("--out", out_path, "Model JSON to write")->required();
    identify_cmd->callback([&] {
        action = [&]() -> CommandOutcome {
            const TimeSeries ts = io::read_sysid_csv_file(data_path);
            const IdentificationResult r = identify(ts, order);
            auto f = open_out(out_path);
            f << config::model_to_json(r.model).dump(2) << '\n';
            out << "A = " << matrix_string(r.model.a()) << '\n';
            out << "B = " << matrix_string(r.model.b()) << '\n';
            out << "sample_rate_hz = " << format_number(r.model.sample_rate()) << '\n';
            out << "residual_rms = " << matrix_string(r.residual_rms.transpose()) << '\n';
            out << "rcond = " << format_number(r.condition_estimate) << '\n';
            return {0, {out_path}, "identified order-" + std::to_string(order) + " model"};
        };
    });

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "VAF of a model against logged data");
    validate_cmd->add_option("--model", model_path, "Model JSON")->required();
    validate_cmd->add_option("--data", data_path, "CSV t,u,theta,theta_dot")->required();
    validate_cmd->callback([&] {
        action = [&]() -> CommandOutcome {
            const StateSpaceModel model = config::load_model(model_path);
            const TimeSeries ts = io::read_sysid_csv_file(data_path);
            if (std::abs(ts.sample_rate - model.sample_rate()) > 0.01 * model.sample_rate())
                throw ValidationError(data_path + ": sample rate " + format_number(ts.sample_rate) +
                                      " Hz does not match the model's " + format_number(model.sample_rate()) + " Hz");
            if (model.outputs() != 2) throw ValidationError(model_path + ": expected 2 outputs");
            const TimeSeries sim = simulate(model, ts.outputs.front(), ts.inputs);
            const char* names[] = {"theta", "theta_dot"};
            std::string summary;
            for (Eigen::Index ch = 0; ch < 2; ++ch) {
                std::vector<double> y;
                std::vector<double> yh;
                for (std::size_t k = 0; k < ts.size(); ++k) {
                    y.push_back(ts.outputs[k](ch));
                    yh.push_back(sim.outputs[k](ch));
                }
                const double v = vaf(y, yh);
                out << "vaf_" << names[ch] << " = " << format_number(v) << " %\n";
                summary += std::string(ch ? ", " : "") + names[ch] + " " + format_number(v) + "%";
            }
            return {0, {}, "VAF " + summary};
        };
    });

    // design
    double q11 = 40.0;
    double r_cost = 1.0;
    double vn22 = 35.0;
    auto* design = app.add_subcommand("design", "Controller and estimator design");
    design->require_subcommand(1);
    auto* design_lqr_cmd = design->add_subcommand("lqr", "LQR gain for Q = diag(q11, 1), R = r");
    design_lqr_cmd->add_option("--model", model_path, "Model JSON")->required();
    design_lqr_cmd->add_option("--q11", q11, "Angle state cost")->capture_default_str();
    design_lqr_cmd->add_option("--r", r_cost, "Input cost")->capture_default_str();
    design_lqr_cmd->callback([&] {
        action = [&]() -> CommandOutcome {
            const StateSpaceModel model = config::load_model(model_path);
            CostPair cost = default_costs(q11);
            cost.q = Matrix::Identity(model.states(), model.states());
            cost.q(0, 0) = q11;
            cost.r = Matrix::Identity(model.inputs(), model.inputs()) * r_cost;
            const ControlDesign d = design_lqr(model, cost);
            out << "K = " << matrix_string(d.k) << '\n';
            out << "P = " << matrix_string(d.p_riccati) << '\n';
            out << "riccati_residual = " << format_number(d.residual) << '\n';
            out << "iterations = " << d.iterations << '\n';
            out << "closed_loop_radius = " << format_number(d.closed_loop_radius) << '\n';
            return {0, {}, "K = " + matrix_string(d.k)};
        };
    });
    auto* design_kalman_cmd = design->add_subcommand("kalman", "Steady-state Kalman gain for Vd = I, Vn = diag(1e-6, vn22)");
    design_kalman_cmd->add_option("--model", model_path, "Model JSON")->required();
    design_kalman_cmd->add_option("--vn22", vn22, "Gyro noise covariance")->capture_default_str();
    design_kalman_cmd->callback([&] {
        action = [&]() -> CommandOutcome {
            const StateSpaceModel model = config::load_model(model_path);
            CovariancePair cov = default_covariances(vn22);
            cov.vd = Matrix::Identity(model.states(), model.states());
            const FilterDesign d = design_filter(model, cov);
            out << "Kf = " << matrix_string(d.kf) << '\n';
            out << "P = " << matrix_string(d.p_riccati) << '\n';
            out << "riccati_residual = " << format_number(d.residual) << '\n';
            out << "iterations = " << d.iterations << '\n';
            out << "closed_loop_radius = " << format_number(d.closed_loop_radius) << '\n';
            return {0, {}, "Kf = " + matrix_string(d.kf)};
        };
    });

    // fuzzy eval
    std::string fuzzy_path = "configs/fuzzy_default.json";
    double theta = 0.0;
    double theta_dot = 0.0;
    auto* fuzzy_cmd = app.add_subcommand("fuzzy", "Fuzzy gain scheduler");
    fuzzy_cmd->require_subcommand(1);
    auto* fuzzy_eval = fuzzy_cmd->add_subcommand("eval", "Scheduled gains at one operating point");
    fuzzy_eval->add_option("--config", fuzzy_path, "Fuzzy config JSON")->capture_default_str();
    fuzzy_eval->add_option("--theta", theta, "CoM pitch angle, deg")->required();
    fuzzy_eval->add_option("--theta-dot", theta_dot, "CoM pitch rate, rad/s")->required();
    fuzzy_eval->callback([&] {
        action = [&]() -> CommandOutcome {
            fuzzy::GainScheduler sched(config::load_fuzzy(fuzzy_path));
            const auto& c = sched.config();
            out << "angle_degrees = " << vector_string(fuzzy::fuzzify(c.angle, theta)) << '\n';
            out << "velocity_degrees = " << vector_string(fuzzy::fuzzify(c.velocity, theta_dot)) << '\n';
            const fuzzy::Gains g = sched.schedule(theta, theta_dot);
            out << "k_theta = " << format_number(g.k_theta) << '\n';
            out << "k_theta_dot = " << format_number(g.k_theta_dot) << '\n';
            return {0, {}, "K = [" + format_number(g.k_theta) + ", " + format_number(g.k_theta_dot) + "]"};
        };
    });

    // simulate
    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    std::string trace_path;
    std::string metrics_path;
    bool fail_on_fall = false;
    double settle_band = 0.02;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run one closed-loop scenario");
    simulate_cmd->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    simulate_cmd->add_option("--seed", seed, "Override the scenario seed");
    simulate_cmd->add_option("--trace", trace_path, "Trace CSV to write");
    simulate_cmd->add_option("--metrics", metrics_path, "Metrics JSON to write");
    simulate_cmd->add_option("--settle-band", settle_band, "Settling band fraction")->capture_default_str();
    simulate_cmd->add_flag("--fail-on-fall", fail_on_fall, "Exit 3 when the robot falls");
    simulate_cmd->callback([&] {
        action = [&]() -> CommandOutcome {
            ScenarioConfig sc = config::load_scenario(scenario_path);
            if (seed) sc.seed = *seed;
            const SimTrace tr = run_scenario(sc);
            const TransientMetrics m = transient_metrics(tr, settle_band);
            CommandOutcome res;
            if (!trace_path.empty()) {
                auto f = open_out(trace_path);
                io::write_trace_csv(f, tr);
                res.artifacts.push_back(trace_path);
            }
            if (!metrics_path.empty()) {
                auto f = open_out(metrics_path);
                f << io::metrics_to_json(m, tr).dump(2) << '\n';
                res.artifacts.push_back(metrics_path);
            }
            const Json mj = io::metrics_to_json(m, tr);
            out << "outcome = " << to_string(tr.outcome) << '\n';
            out << "samples = " << tr.records.size() << '\n';
            out << "max_abs_theta = " << format_number(mj["max_abs_theta"].get<double>()) << '\n';
            out << "steps_taken = " << tr.steps_taken << '\n';
            out << "rise_time = " << opt_string(m.rise_time) << '\n';
            out << "settling_time = " << opt_string(m.settling_time) << '\n';
            out << "max_overshoot = " << opt_string(m.max_overshoot) << '\n';
            out << "robustness_delta = " << opt_string(m.robustness_delta) << '\n';
            res.summary = sc.name + ": " + to_string(tr.outcome);
            res.exit_code = (fail_on_fall && tr.outcome == Outcome::Fell) ? 3 : 0;
            return res;
        };
    });

    // sweep
    std::string param;
    std::string values;
    bool with_tolerance = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario over a list of parameter values");
    sweep_cmd->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    sweep_cmd->add_option("--param", param, "Scenario field, e.g. q11, controller, plant.gyro_noise_std")->required();
    sweep_cmd->add_option("--values", values, "Comma-separated values")->required();
    sweep_cmd->add_option("--out", out_path, "CSV table to write");
    sweep_cmd->add_flag("--tolerance", with_tolerance, "Also run the scenario's tolerance search per value");
    sweep_cmd->callback([&] {
        action = [&]() -> CommandOutcome {
            const ScenarioConfig base = config::load_scenario(scenario_path);
            const Json base_json = config::scenario_to_json(base);
            const auto tokens = split_values(values);
            std::vector<ScenarioConfig> configs;
            for (const auto& tok : tokens) {
                Json j = base_json;
                set_path(j, param, parse_value(tok));
                try {
                    configs.push_back(config::scenario_from_json(j));
                } catch (const ValidationError& e) {
                    throw ValidationError("--param " + param + "=" + tok + ": " + e.what());
                }
            }
            if (with_tolerance && !base.tolerance)
                throw ValidationError(scenario_path + ": tolerance: missing (needed by --tolerance)");
            const auto traces = run_batch(configs);

            std::vector<std::string> header{param, "outcome", "max_abs_theta", "rise_time", "settling_time",
                                            "max_overshoot", "robustness_delta", "steps"};
            if (with_tolerance) header.push_back("tolerated");
            std::vector<std::vector<std::string>> rows;
            for (std::size_t i = 0; i < configs.size(); ++i) {
                const TransientMetrics m = transient_metrics(traces[i]);
                const Json mj = io::metrics_to_json(m, traces[i]);
                std::vector<std::string> row{tokens[i],
                                             to_string(traces[i].outcome),
                                             format_number(mj["max_abs_theta"].get<double>()),
                                             opt_string(m.rise_time),
                                             opt_string(m.settling_time),
                                             opt_string(m.max_overshoot),
                                             opt_string(m.robustness_delta),
                                             std::to_string(traces[i].steps_taken)};
                if (with_tolerance) {
                    const ToleranceResult t = tolerance_search(configs[i], *configs[i].tolerance);
                    row.push_back(t.bottom_failed ? "fails_at_range_bottom" : format_number(*t.tolerated));
                }
                rows.push_back(std::move(row));
            }
            std::vector<std::size_t> width(header.size());
            for (std::size_t c = 0; c < header.size(); ++c) {
                width[c] = header[c].size();
                for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
            }
            auto print = [&](const std::vector<std::string>& r) {
                for (std::size_t c = 0; c < r.size(); ++c)
                    out << std::left << std::setw(static_cast<int>(width[c] + 2)) << r[c];
                out << '\n';
            };
            print(header);
            for (const auto& r : rows) print(r);
            CommandOutcome res{0, {}, "swept " + param + " over " + std::to_string(rows.size()) + " values"};
            if (!out_path.empty()) {
                auto f = open_out(out_path);
                for (const auto* r : {&header}) {
                    for (std::size_t c = 0; c < r->size(); ++c) f << (c ? "," : "") << (*r)[c];
                    f << '\n';
                }
                for (const auto& r : rows) {
                    for (std::size_t c = 0; c < r.size(); ++c) f << (c ? "," : "") << r[c];
                    f << '\n';
                }
                res.artifacts.push_back(out_path);
            }
            return res;
        };
    });

    // tolerance
    std::string controller_override;
    auto* tolerance_cmd = app.add_subcommand("tolerance", "Largest disturbance magnitude the scenario survives");
    tolerance_cmd->add_option("--scenario", scenario_path, "Scenario JSON with a tolerance block")->required();
    tolerance_cmd->add_option("--controller", controller_override, "none, lqr_fixed or lqr_fuzzy");
    tolerance_cmd->callback([&] {
        action = [&]() -> CommandOutcome {
            Json j = config::scenario_to_json(config::load_scenario(scenario_path));
            if (!controller_override.empty()) j["controller"] = controller_override;
            const ScenarioConfig sc = config::scenario_from_json(j);
            if (!sc.tolerance) throw ValidationError(scenario_path + ": tolerance: missing");
            const ToleranceResult t = tolerance_search(sc, *sc.tolerance);
            out << "controller = " << to_string(sc.controller) << '\n';
            if (t.bottom_failed) {
                out << "tolerated = none (fails at range bottom " << format_number(sc.tolerance->lo) << ")\n";
            } else {
                out << "tolerated = " << format_number(*t.tolerated) << '\n';
            }
            out << "bisection_steps = " << t.bisection_steps << '\n';
            out << "scenario_runs = " << t.scenario_runs << '\n';
            return {0, {}, t.bottom_failed ? "range bottom fails" : "tolerated " + format_number(*t.tolerated)};
        };
    });

    // check
    std::string kind = "scenario";
    std::string check_path;
    auto* check_cmd = app.add_subcommand("check", "Load and validate a config file");
    check_cmd->add_option("--kind", kind, "model, fuzzy or scenario")
        ->check(CLI::IsMember({"model", "fuzzy", "scenario"}))
        ->capture_default_str();
    check_cmd->add_option("path", check_path, "Config JSON")->required();
    check_cmd->callback([&] {
        action = [&]() -> CommandOutcome {
            const auto k = kind == "model" ? config::Kind::Model
                           : kind == "fuzzy" ? config::Kind::Fuzzy
                                             : config::Kind::Scenario;
            config::load_and_validate_config(check_path, k);
            out << check_path << ": ok\n";
            return {0, {}, check_path + ": ok"};
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return {code == 0 ? 0 : 1, {}, e.what()};
    }

    try {
        CommandOutcome res = action();
        for (const auto& a : res.artifacts) err << "wrote " << a << '\n';
        return res;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return {1, {}, e.what()};
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return {2, {}, e.what()};
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return {1, {}, e.what()};
    }
}

CommandOutcome dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("pitchstab");
    for (const auto& a : args) argv.push_back(a.c_str());
    return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace pitchstab::cli
