#include "pitchstab/config.hpp"

#include "pitchstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace pitchstab::config {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) throw ValidationError((path.empty() ? std::string("document") : path) + ": expected an object");
}

void check_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    require_object(j, path);
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ValidationError(join(path, key) + ": unknown field");
    }
}

double as_number(const Json& j, const std::string& path) {
    if (!j.is_number()) throw ValidationError(path + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ValidationError(path + ": must be finite");
    return v;
}

const Json& required(const Json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw ValidationError(join(path, key) + ": missing");
    return j.at(key);
}

double number_or(const Json& j, const char* key, const std::string& path, double fallback) {
    return j.contains(key) ? as_number(j.at(key), join(path, key)) : fallback;
}

bool bool_or(const Json& j, const char* key, const std::string& path, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) throw ValidationError(join(path, key) + ": expected true or false");
    return j.at(key).get<bool>();
}

std::string string_at(const Json& j, const std::string& path) {
    if (!j.is_string()) throw ValidationError(path + ": expected a string");
    return j.get<std::string>();
}

Matrix as_matrix(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ValidationError(path + ": expected a nonempty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].empty()) throw ValidationError(idx(path, r) + ": expected a nonempty row");
        if (r == 0) cols = j[r].size();
        if (j[r].size() != cols)
            throw ValidationError(idx(path, r) + ": row has " + std::to_string(j[r].size()) + " entries, expected " +
                                  std::to_string(cols));
    }
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                as_number(j[r][c], idx(idx(path, r), c));
    return m;
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

fuzzy::MFPartition as_partition(const Json& j, const std::string& path, const std::string& name,
                                 const std::string& units) {
    if (!j.is_array() || j.empty()) throw ValidationError(path + ": expected a nonempty array of [b1,u1,u2,b2]");
    fuzzy::MFPartition p{name, units, {}};
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        if (!e.is_array() || e.size() != 4) throw ValidationError(idx(path, i) + ": expected [b1, u1, u2, b2]");
        p.mfs.push_back({as_number(e[0], idx(idx(path, i), 0)), as_number(e[1], idx(idx(path, i), 1)),
                         as_number(e[2], idx(idx(path, i), 2)), as_number(e[3], idx(idx(path, i), 3))});
    }
    p.validate(path);
    return p;
}

Json partition_to_json(const fuzzy::MFPartition& p) {
    Json a = Json::array();
    for (const auto& m : p.mfs) a.push_back({m.b1, m.u1, m.u2, m.b2});
    return a;
}

fuzzy::RuleTable as_rules(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ValidationError(path + ": expected a nonempty array of rows");
    fuzzy::RuleTable t;
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array()) throw ValidationError(idx(path, r) + ": expected a row of integers");
        std::vector<int> row;
        for (std::size_t c = 0; c < j[r].size(); ++c) {
            if (!j[r][c].is_number_integer()) throw ValidationError(idx(idx(path, r), c) + ": expected an integer");
            row.push_back(j[r][c].get<int>());
        }
        t.grid.push_back(std::move(row));
    }
    return t;
}

Json resolve(const Json& j, const std::string& path) {
    if (j.is_string()) {
        try {
            return read_json_file(j.get<std::string>());
        } catch (const ValidationError& e) {
            throw ValidationError(path + ": " + e.what());
        }
    }
    return j;
}

DisturbanceEvent as_event(const Json& j, const std::string& path) {
    check_keys(j, path, {"kind", "at_s", "direction", "energy_j", "efficiency", "bias", "duration_s"});
    DisturbanceEvent e;
    const std::string kind = string_at(required(j, "kind", path), join(path, "kind"));
    if (kind == "impulse") {
        e.kind = DisturbanceKind::Impulse;
        e.energy = as_number(required(j, "energy_j", path), join(path, "energy_j"));
        e.efficiency = number_or(j, "efficiency", path, 0.5);
        if (j.contains("bias") || j.contains("duration_s"))
            throw ValidationError(path + ": bias/duration_s only apply to constant disturbances");
    } else if (kind == "constant") {
        e.kind = DisturbanceKind::Constant;
        e.bias = as_number(required(j, "bias", path), join(path, "bias"));
        e.duration = as_number(required(j, "duration_s", path), join(path, "duration_s"));
        if (j.contains("energy_j") || j.contains("efficiency"))
            throw ValidationError(path + ": energy_j/efficiency only apply to impulse disturbances");
    } else {
        throw ValidationError(join(path, "kind") + ": expected impulse or constant");
    }
    e.at_time = as_number(required(j, "at_s", path), join(path, "at_s"));
    e.direction = number_or(j, "direction", path, 1.0);
    e.validate(path);
    return e;
}

Json event_to_json(const DisturbanceEvent& e) {
    Json j;
    j["at_s"] = e.at_time;
    j["direction"] = e.direction;
    if (e.kind == DisturbanceKind::Impulse) {
        j["kind"] = "impulse";
        j["energy_j"] = e.energy;
        j["efficiency"] = e.efficiency;
    } else {
        j["kind"] = "constant";
        j["bias"] = e.bias;
        j["duration_s"] = e.duration;
    }
    return j;
}

ControllerMode as_controller(const Json& j, const std::string& path) {
    const std::string s = string_at(j, path);
    if (s == "none") return ControllerMode::None;
    if (s == "lqr_fixed") return ControllerMode::LqrFixed;
    if (s == "lqr_fuzzy") return ControllerMode::LqrFuzzy;
    throw ValidationError(path + ": expected none, lqr_fixed or lqr_fuzzy, got \"" + s + "\"");
}

}  // namespace

StateSpaceModel model_from_json(const Json& j) {
    check_keys(j, "", {"a", "b", "c", "sample_rate_hz", "units"});
    Matrix a = as_matrix(required(j, "a", ""), "a");
    Matrix b = as_matrix(required(j, "b", ""), "b");
    Matrix c = as_matrix(required(j, "c", ""), "c");
    const double fs = as_number(required(j, "sample_rate_hz", ""), "sample_rate_hz");
    return StateSpaceModel(a, b, c, fs);
}

Json model_to_json(const StateSpaceModel& m) {
    Json j;
    j["a"] = matrix_to_json(m.a());
    j["b"] = matrix_to_json(m.b());
    j["c"] = matrix_to_json(m.c());
    j["sample_rate_hz"] = m.sample_rate();
    j["units"] = {{"theta", "deg"}, {"theta_dot", "gyro native (rad/s label)"}, {"u", "deg, ankle pitch delta"}};
    return j;
}

fuzzy::FuzzyConfig fuzzy_from_json(const Json& j) {
    check_keys(j, "", {"angle_mfs", "velocity_mfs", "angle_gain_mfs", "velocity_gain_mfs", "angle_gain_rules",
                       "velocity_gain_rules"});
    fuzzy::FuzzyConfig c;
    c.angle = as_partition(required(j, "angle_mfs", ""), "angle_mfs", "angle", "deg");
    c.velocity = as_partition(required(j, "velocity_mfs", ""), "velocity_mfs", "velocity", "rad/s");
    c.angle_gain = as_partition(required(j, "angle_gain_mfs", ""), "angle_gain_mfs", "angle_gain", "");
    c.velocity_gain = as_partition(required(j, "velocity_gain_mfs", ""), "velocity_gain_mfs", "velocity_gain", "");
    c.angle_gain_rules = as_rules(required(j, "angle_gain_rules", ""), "angle_gain_rules");
    c.velocity_gain_rules = as_rules(required(j, "velocity_gain_rules", ""), "velocity_gain_rules");
    c.validate();
    return c;
}

Json fuzzy_to_json(const fuzzy::FuzzyConfig& c) {
    Json j;
    j["angle_mfs"] = partition_to_json(c.angle);
    j["velocity_mfs"] = partition_to_json(c.velocity);
    j["angle_gain_mfs"] = partition_to_json(c.angle_gain);
    j["velocity_gain_mfs"] = partition_to_json(c.velocity_gain);
    j["angle_gain_rules"] = c.angle_gain_rules.grid;
    j["velocity_gain_rules"] = c.velocity_gain_rules.grid;
    return j;
}

ScenarioConfig scenario_from_json(const Json& j) {
    check_keys(j, "", {"name", "duration_s", "seed", "controller", "q11", "vn22", "u_limit_deg", "neutral_deg",
                       "fall_threshold_deg", "initial_state", "model", "fuzzy", "plant", "capture_point",
                       "disturbances", "tolerance"});
    ScenarioConfig s;
    if (j.contains("name")) s.name = string_at(j.at("name"), "name");
    s.duration = as_number(required(j, "duration_s", ""), "duration_s");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ValidationError("seed: expected a nonnegative integer");
        s.seed = j.at("seed").get<std::uint64_t>();
    }
    s.controller = as_controller(required(j, "controller", ""), "controller");
    s.q11 = number_or(j, "q11", "", s.q11);
    s.vn22 = number_or(j, "vn22", "", s.vn22);
    s.u_limit = number_or(j, "u_limit_deg", "", s.u_limit);
    s.neutral = number_or(j, "neutral_deg", "", s.neutral);
    s.fall_threshold = number_or(j, "fall_threshold_deg", "", s.fall_threshold);
    if (j.contains("initial_state")) {
        const auto& x0 = j.at("initial_state");
        if (!x0.is_array() || x0.size() != 2) throw ValidationError("initial_state: expected [theta_deg, theta_dot]");
        s.theta0 = as_number(x0[0], "initial_state[0]");
        s.theta_dot0 = as_number(x0[1], "initial_state[1]");
    }
    if (j.contains("model")) {
        try {
            s.plant.model = model_from_json(resolve(j.at("model"), "model"));
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("model: ") + e.what());
        }
    }
    if (j.contains("fuzzy")) {
        try {
            s.fuzzy = fuzzy_from_json(resolve(j.at("fuzzy"), "fuzzy"));
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("fuzzy: ") + e.what());
        }
    }
    if (j.contains("plant")) {
        const auto& p = j.at("plant");
        check_keys(p, "plant", {"mode", "gyro_noise_std", "inertia_proxy", "nonlinear"});
        if (p.contains("mode")) {
            const std::string mode = string_at(p.at("mode"), "plant.mode");
            if (mode == "linear")
                s.plant.mode = PlantMode::Linear;
            else if (mode == "nonlinear")
                s.plant.mode = PlantMode::Nonlinear;
            else
                throw ValidationError("plant.mode: expected linear or nonlinear, got \"" + mode + "\"");
        }
        s.plant.gyro_noise_std = number_or(p, "gyro_noise_std", "plant", s.plant.gyro_noise_std);
        s.plant.inertia_proxy = number_or(p, "inertia_proxy", "plant", s.plant.inertia_proxy);
        if (p.contains("nonlinear")) {
            const auto& n = p.at("nonlinear");
            const std::string np = "plant.nonlinear";
            check_keys(n, np, {"rate_scale", "toppling", "support", "edge_deg", "damping", "servo_gain",
                               "servo_time_constant_s"});
            auto& q = s.plant.nonlinear;
            q.rate_scale = number_or(n, "rate_scale", np, q.rate_scale);
            q.toppling = number_or(n, "toppling", np, q.toppling);
            q.support = number_or(n, "support", np, q.support);
            q.edge_deg = number_or(n, "edge_deg", np, q.edge_deg);
            q.damping = number_or(n, "damping", np, q.damping);
            q.servo_gain = number_or(n, "servo_gain", np, q.servo_gain);
            q.servo_time_constant = number_or(n, "servo_time_constant_s", np, q.servo_time_constant);
        }
    }
    if (j.contains("capture_point")) {
        const auto& c = j.at("capture_point");
        const std::string cp = "capture_point";
        check_keys(c, cp, {"enabled", "z_com", "g", "x_offset", "support_threshold", "max_step", "step_period_s"});
        auto& k = s.capture;
        k.enabled = bool_or(c, "enabled", cp, k.enabled);
        k.params.z_com = number_or(c, "z_com", cp, k.params.z_com);
        k.params.g = number_or(c, "g", cp, k.params.g);
        k.params.x_offset = number_or(c, "x_offset", cp, k.params.x_offset);
        k.support_threshold = number_or(c, "support_threshold", cp, k.support_threshold);
        k.max_step = number_or(c, "max_step", cp, k.max_step);
        k.step_period = number_or(c, "step_period_s", cp, k.step_period);
    }
    if (j.contains("disturbances")) {
        const auto& d = j.at("disturbances");
        if (!d.is_array()) throw ValidationError("disturbances: expected an array");
        for (std::size_t i = 0; i < d.size(); ++i) s.disturbances.push_back(as_event(d[i], idx("disturbances", i)));
    }
    if (j.contains("tolerance")) {
        const auto& t = j.at("tolerance");
        check_keys(t, "tolerance", {"event", "lo", "hi", "resolution", "trials", "pass_fraction"});
        ToleranceSpec spec;
        if (t.contains("event")) {
            if (!t.at("event").is_number_unsigned()) throw ValidationError("tolerance.event: expected an index");
            spec.event = t.at("event").get<std::size_t>();
        }
        spec.lo = number_or(t, "lo", "tolerance", spec.lo);
        spec.hi = number_or(t, "hi", "tolerance", spec.hi);
        spec.resolution = number_or(t, "resolution", "tolerance", spec.resolution);
        if (t.contains("trials")) {
            if (!t.at("trials").is_number_integer()) throw ValidationError("tolerance.trials: expected an integer");
            spec.trials = t.at("trials").get<int>();
        }
        spec.pass_fraction = number_or(t, "pass_fraction", "tolerance", spec.pass_fraction);
        s.tolerance = spec;
    }
    s.validate();
    return s;
}

Json scenario_to_json(const ScenarioConfig& s) {
    Json j;
    j["name"] = s.name;
    j["duration_s"] = s.duration;
    j["seed"] = s.seed;
    j["controller"] = to_string(s.controller);
    j["q11"] = s.q11;
    j["vn22"] = s.vn22;
    j["u_limit_deg"] = s.u_limit;
    j["neutral_deg"] = s.neutral;
    j["fall_threshold_deg"] = s.fall_threshold;
    j["initial_state"] = {s.theta0, s.theta_dot0};
    j["model"] = model_to_json(s.plant.model);
    j["fuzzy"] = fuzzy_to_json(s.fuzzy);
    const auto& q = s.plant.nonlinear;
    j["plant"] = {{"mode", s.plant.mode == PlantMode::Linear ? "linear" : "nonlinear"},
                  {"gyro_noise_std", s.plant.gyro_noise_std},
                  {"inertia_proxy", s.plant.inertia_proxy},
                  {"nonlinear",
                   {{"rate_scale", q.rate_scale},
                    {"toppling", q.toppling},
                    {"support", q.support},
                    {"edge_deg", q.edge_deg},
                    {"damping", q.damping},
                    {"servo_gain", q.servo_gain},
                    {"servo_time_constant_s", q.servo_time_constant}}}};
    const auto& c = s.capture;
    j["capture_point"] = {{"enabled", c.enabled},
                          {"z_com", c.params.z_com},
                          {"g", c.params.g},
                          {"x_offset", c.params.x_offset},
                          {"support_threshold", c.support_threshold},
                          {"max_step", c.max_step},
                          {"step_period_s", c.step_period}};
    j["disturbances"] = Json::array();
    for (const auto& e : s.disturbances) j["disturbances"].push_back(event_to_json(e));
    if (s.tolerance) {
        const auto& t = *s.tolerance;
        j["tolerance"] = {{"event", t.event},           {"lo", t.lo},         {"hi", t.hi},
                          {"resolution", t.resolution}, {"trials", t.trials}, {"pass_fraction", t.pass_fraction}};
    }
    return j;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path + ": cannot open");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(path + ": malformed JSON (" + e.what() + ")");
    }
}

StateSpaceModel load_model(const std::string& path) {
    const Json j = read_json_file(path);
    try {
        return model_from_json(j);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

fuzzy::FuzzyConfig load_fuzzy(const std::string& path) {
    const Json j = read_json_file(path);
    try {
        return fuzzy_from_json(j);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

ScenarioConfig load_scenario(const std::string& path) {
    const Json j = read_json_file(path);
    try {
        return scenario_from_json(j);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

AnyConfig load_and_validate_config(const std::string& path, Kind kind) {
    switch (kind) {
        case Kind::Model: return load_model(path);
        case Kind::Fuzzy: return load_fuzzy(path);
        case Kind::Scenario: return load_scenario(path);
    }
    throw ValidationError("unknown config kind");
}

}  // namespace pitchstab::config
