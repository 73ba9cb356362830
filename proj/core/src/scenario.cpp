#include "chance_rrt/scenario.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "chance_rrt/errors.hpp"
#include "json.hpp"

namespace chance_rrt {

namespace {

using nlohmann::json;

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ScenarioError(display(path_), "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ScenarioError(field(key), "expected a number");
      out = v->get<double>();
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ScenarioError(field(key), "expected an integer");
      const auto value = v->get<std::int64_t>();
      if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
        throw ScenarioError(field(key), "integer out of range");
      }
      out = static_cast<int>(value);
    }
  }

  void seed(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || (!v->is_number_unsigned() && v->get<std::int64_t>() < 0)) {
        throw ScenarioError(field(key), "expected a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ScenarioError(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ScenarioError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ScenarioError(field(it.key()), "unknown field");
    }
  }

 private:
  static std::string display(const std::string& p) { return p.empty() ? "<root>" : p; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ScenarioError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ScenarioError(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

template <class Fn>
void checked(const std::string& field, Fn&& fn) {
  try {
    fn();
  } catch (const DomainError& e) {
    throw ScenarioError(field, e.what());
  }
}

void read_sensor(const json& j, const std::string& path, SensorNoiseProfile& p) {
  ObjectReader r(j, path);
  r.integer("samples_per_detection", p.samples_per_detection);
  r.number("sigma0", p.sigma0);
  r.number("k_dist", p.k_dist);
  r.number("k_azimuth", p.k_azimuth);
  r.number("theta_noise", p.theta_noise);
  r.number("misdetect_rate", p.misdetect_rate);
  r.number("occluded_misdetect_rate", p.occluded_misdetect_rate);
  r.number("clutter_rate", p.clutter_rate);
  r.number("max_range", p.max_range);
  r.integer("num_classes", p.num_classes);
  r.number("confidence_base", p.confidence_base);
  r.number("confidence_decay", p.confidence_decay);
  r.number("score_jitter", p.score_jitter);
  r.number("log_variance_jitter", p.log_variance_jitter);
  r.number("clutter_position_sigma", p.clutter_position_sigma);
  r.number("clutter_confidence_min", p.clutter_confidence_min);
  r.number("clutter_confidence_max", p.clutter_confidence_max);
  r.finish();
  checked(path, [&] { p.validate(); });
}

void read_motion(const json& j, const std::string& path, MotionConfig& m) {
  ObjectReader r(j, path);
  r.number("wheelbase", m.wheelbase);
  r.number("ego_length", m.ego_length);
  r.number("ego_width", m.ego_width);
  r.number("dt", m.dt);
  double q = m.process_noise(0, 0);
  double s0 = m.initial_covariance(0, 0);
  r.number("process_noise_var", q);
  r.number("initial_var", s0);
  m.process_noise = Mat2::Identity() * q;
  m.initial_covariance = Mat2::Identity() * s0;
  r.number("lookahead", m.lookahead);
  r.number("v_max", m.v_max);
  r.number("steer_max", m.steer_max);
  r.number("a_min", m.a_min);
  r.number("a_max", m.a_max);
  r.number("cruise_speed", m.cruise_speed);
  r.number("speed_gain", m.speed_gain);
  r.number("goal_tolerance", m.goal_tolerance);
  r.integer("max_steps", m.max_steps);
  r.finish();
  checked(path, [&] { m.validate(); });
}

PlanarBounds read_bounds(const json& j, const std::string& path) {
  PlanarBounds b;
  ObjectReader r(j, path);
  r.number("x_min", b.x_min);
  r.number("x_max", b.x_max);
  r.number("y_min", b.y_min);
  r.number("y_max", b.y_max);
  r.finish();
  return b;
}

void read_planner(const json& j, const std::string& path, PlannerConfig& p, bool& has_sample_region) {
  ObjectReader r(j, path);
  std::string mode = to_string(p.mode);
  r.string("mode", mode);
  try {
    p.mode = parse_mode(mode);
  } catch (const DomainError& e) {
    throw ScenarioError(r.field("mode"), e.what());
  }
  r.number("k_cc", p.k_cc);
  r.number("k_dist", p.k_dist);
  r.integer("candidates", p.candidates);
  r.integer("max_iterations", p.max_iterations);
  r.number("expansion_interval", p.expansion_interval);
  r.boolean("wall_clock_budget", p.wall_clock_budget);
  r.number("goal_bias", p.goal_bias);
  r.number("node_interval", p.node_interval);
  r.number("replan_horizon", p.replan_horizon);
  r.integer("max_cycles", p.max_cycles);
  r.number("cc_fixed_sigma", p.cc_fixed_sigma);
  r.number("pe_max", p.pe_max);
  r.number("mi_max", p.mi_max);
  r.boolean("require_safe_stop", p.require_safe_stop);
  r.number("safe_stop_dwell", p.safe_stop_dwell);
  if (const json* v = r.find("sample_region")) {
    p.sample_region = read_bounds(*v, r.field("sample_region"));
    has_sample_region = true;
  }
  r.finish();
}

void read_risk(const json& j, const std::string& path, RiskConfig& rc) {
  ObjectReader r(j, path);
  r.number("p_safe", rc.p_safe);
  std::string method = rc.erf_method == ErfMethod::kRational ? "rational" : "table";
  r.string("erf", method);
  if (method == "rational") {
    rc.erf_method = ErfMethod::kRational;
  } else if (method == "table") {
    rc.erf_method = ErfMethod::kLookupTable;
  } else {
    throw ScenarioError(r.field("erf"), "expected \"rational\" or \"table\"");
  }
  r.finish();
  checked(path, [&] { rc.validate(); });
}

GroundTruthObstacle read_obstacle(const json& j, const std::string& path, int default_id) {
  GroundTruthObstacle o;
  o.id = default_id;
  ObjectReader r(j, path);
  r.integer("id", o.id);
  double x = 0.0, y = 0.0, vx = 0.0, vy = 0.0;
  if (!j.contains("x")) throw ScenarioError(r.field("x"), "required");
  if (!j.contains("y")) throw ScenarioError(r.field("y"), "required");
  r.number("x", x);
  r.number("y", y);
  r.number("heading", o.heading);
  r.number("h", o.h);
  r.number("w", o.w);
  r.number("l", o.l);
  r.number("vx", vx);
  r.number("vy", vy);
  r.finish();
  o.position = Vec2(x, y);
  o.velocity = Vec2(vx, vy);
  if (!(o.h > 0.0)) throw ScenarioError(r.field("h"), "must be positive");
  if (!(o.w > 0.0)) throw ScenarioError(r.field("w"), "must be positive");
  if (!(o.l > 0.0)) throw ScenarioError(r.field("l"), "must be positive");
  return o;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("<root>", std::string("malformed JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return ss.str();
}

}  // namespace

void Scenario::validate() const {
  if (road.lanes < 1) throw ScenarioError("road.lanes", "must be >= 1");
  if (!(road.lane_width > 0.0)) throw ScenarioError("road.lane_width", "must be positive");
  if (!(road.length > 0.0)) throw ScenarioError("road.length", "must be positive");
  if (trials < 1) throw ScenarioError("trials", "must be >= 1");
  if (!road.bounds().contains(goal)) throw ScenarioError("goal", "must lie inside the road");
  if (!road.bounds().contains(ego.position())) throw ScenarioError("ego", "must lie inside the road");
  if (ego.speed < 0.0 || ego.speed > motion.v_max) throw ScenarioError("ego.speed", "must lie in [0, v_max]");
  checked("sensor", [&] { sensor.validate(); });
  checked("motion", [&] { motion.validate(); });
  checked("planner", [&] { planner.validate(); });
  checked("risk", [&] { risk.validate(); });
  std::set<int> ids;
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    if (!ids.insert(obstacles[i].id).second) {
      throw ScenarioError("obstacles[" + std::to_string(i) + "].id", "duplicate id");
    }
  }
}

Scenario parse_scenario(const std::string& json_text) {
  const json j = parse_json(json_text);
  Scenario s;
  ObjectReader r(j, "");
  r.string("name", s.name);

  if (const json* v = r.find("road")) {
    ObjectReader rr(*v, "road");
    rr.integer("lanes", s.road.lanes);
    rr.number("lane_width", s.road.lane_width);
    rr.number("length", s.road.length);
    rr.finish();
  }
  if (const json* v = r.find("ego")) {
    ObjectReader er(*v, "ego");
    er.number("x", s.ego.x);
    er.number("y", s.ego.y);
    er.number("heading", s.ego.heading);
    er.number("speed", s.ego.speed);
    er.finish();
  }
  if (const json* v = r.find("goal")) {
    ObjectReader gr(*v, "goal");
    double x = s.goal.x(), y = s.goal.y();
    gr.number("x", x);
    gr.number("y", y);
    gr.number("radius", s.planner.goal_radius);
    gr.finish();
    s.goal = Vec2(x, y);
  }
  if (const json* v = r.find("obstacles")) {
    if (!v->is_array()) throw ScenarioError("obstacles", "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      s.obstacles.push_back(
          read_obstacle((*v)[i], "obstacles[" + std::to_string(i) + "]", static_cast<int>(i)));
    }
  }
  if (const json* v = r.find("sensor")) read_sensor(*v, "sensor", s.sensor);
  if (const json* v = r.find("motion")) read_motion(*v, "motion", s.motion);
  bool has_sample_region = false;
  if (const json* v = r.find("planner")) read_planner(*v, "planner", s.planner, has_sample_region);
  if (const json* v = r.find("risk")) read_risk(*v, "risk", s.risk);
  r.integer("trials", s.trials);
  r.seed("base_seed", s.base_seed);
  r.finish();

  s.planner.drivable_region = s.road.bounds();
  if (!has_sample_region) s.planner.sample_region = s.road.bounds();
  s.planner.seed = s.base_seed;
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(read_file(path)); }

void SweepConfig::validate() const {
  if (distances.empty()) throw ScenarioError("distances", "must not be empty");
  if (azimuths.empty()) throw ScenarioError("azimuths_deg", "must not be empty");
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (!(distances[i] >= 0.0)) throw ScenarioError("distances[" + std::to_string(i) + "]", "must be >= 0");
  }
  if (frames < 1) throw ScenarioError("frames", "must be >= 1");
  checked("sensor", [&] { profile.validate(); });
}

SweepConfig parse_sweep_config(const std::string& json_text) {
  const json j = parse_json(json_text);
  SweepConfig cfg;
  if (!j.is_object()) throw ScenarioError("<root>", "expected an object");
  if (!j.contains("sensor")) {
    read_sensor(j, "", cfg.profile);
  } else {
    ObjectReader r(j, "");
    read_sensor(*r.find("sensor"), "sensor", cfg.profile);
    if (const json* v = r.find("distances")) cfg.distances = number_list(*v, "distances");
    if (const json* v = r.find("azimuths_deg")) {
      cfg.azimuths = number_list(*v, "azimuths_deg");
      for (double& a : cfg.azimuths) a *= kPi / 180.0;
    }
    r.integer("frames", cfg.frames);
    r.seed("seed", cfg.seed);
    r.finish();
  }
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  return parse_sweep_config(read_file(path));
}

}  // namespace chance_rrt
