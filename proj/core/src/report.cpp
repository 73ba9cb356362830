#include "chance_rrt/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "chance_rrt/errors.hpp"
#include "json.hpp"

namespace chance_rrt {

namespace {

using nlohmann::json;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string num(double v) { return fmt("%.9g", v); }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json belief_json(const ObstacleBelief& o) {
  return json{{"id", o.id},
              {"x", o.center.x()},
              {"y", o.center.y()},
              {"heading", o.heading},
              {"semi_axis_lon", o.semi_axis_lon},
              {"semi_axis_lat", o.semi_axis_lat},
              {"sigma_lon", o.sigma_lon},
              {"sigma_lat", o.sigma_lat},
              {"pe", o.pe},
              {"mi", o.mi}};
}

// World meters to SVG user units: 10 px per meter, y up.
constexpr double kScale = 10.0;
constexpr double kMargin = 20.0;

struct Canvas {
  double width;
  double height;
  double y_top;

  double sx(double x) const { return kMargin + kScale * x; }
  double sy(double y) const { return kMargin + kScale * (y_top - y); }
};

std::string polygon(const Canvas& c, const OrientedBox& box, const char* style) {
  std::string pts;
  for (const auto& p : box.corners()) {
    if (!pts.empty()) pts += ' ';
    pts += num(c.sx(p.x())) + "," + num(c.sy(p.y()));
  }
  return "<polygon points=\"" + pts + "\" " + style + "/>\n";
}

}  // namespace

std::string format_metrics_csv(std::span<const ModeMetrics> metrics) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& m : metrics) {
    if (m.trials < 1) continue;
    out += to_string(m.mode);
    for (double v : {m.rate_succ_1, m.rate_succ_2, m.rate_succ_3, m.risk_max, m.risk_avg, m.n_waypoints,
                     m.traj_length_m}) {
      out += ',' + num(v);
    }
    out += '\n';
  }
  return out;
}

std::string format_trace_jsonl(std::span<const TrialResult> trials) {
  std::string out;
  for (const auto& t : trials) {
    for (const auto& c : t.trace.cycles) {
      json perceived = json::array();
      for (const auto& o : c.perceived) perceived.push_back(belief_json(o));
      json rec{{"mode", to_string(t.mode)},
               {"trial", t.trial},
               {"seed", t.seed},
               {"cycle", c.cycle},
               {"time", c.time},
               {"ego", {c.start.x, c.start.y, c.start.heading, c.start.speed}},
               {"detections", c.detections},
               {"clutter", c.clutter},
               {"rejected", c.rejected},
               {"rejected_clutter", c.rejected_clutter},
               {"tree_size", c.tree_size},
               {"iterations", c.iterations},
               {"goal_paths", c.goal_paths},
               {"reaches_goal", c.reaches_goal},
               {"deadlock", c.deadlock},
               {"path_score", finite_or_null(c.path_score)},
               {"executed_steps", c.executed_steps},
               {"max_step_risk", c.max_step_risk},
               {"status", to_string(t.trace.status)},
               {"perceived", perceived}};
      out += rec.dump() + "\n";
    }
  }
  return out;
}

std::string svg_ellipse(const ObstacleBelief& o) {
  // Drawn in world units inside the flipped group, so rx/ry are the semi-axes.
  const double deg = o.heading * 180.0 / kPi;
  return "<ellipse cx=\"" + num(o.center.x()) + "\" cy=\"" + num(o.center.y()) + "\" rx=\"" +
         num(o.semi_axis_lon) + "\" ry=\"" + num(o.semi_axis_lat) + "\" transform=\"rotate(" + num(deg) +
         " " + num(o.center.x()) + " " + num(o.center.y()) +
         ")\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"0.08\"/>\n";
}

std::string render_svg(const Scenario& scenario, const RunTrace& trace) {
  const Road& road = scenario.road;
  const Canvas c{road.length * kScale + 2 * kMargin, road.width() * kScale + 2 * kMargin, road.width()};
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(c.width) + "\" height=\"" +
                  num(c.height) + "\" viewBox=\"0 0 " + num(c.width) + " " + num(c.height) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(c.width) + "\" height=\"" + num(c.height) + "\" fill=\"white\"/>\n";
  s += "<rect x=\"" + num(c.sx(0)) + "\" y=\"" + num(c.sy(road.width())) + "\" width=\"" +
       num(road.length * kScale) + "\" height=\"" + num(road.width() * kScale) + "\" fill=\"#eeeeee\"/>\n";
  for (int k = 0; k <= road.lanes; ++k) {
    const double y = c.sy(k * road.lane_width);
    const bool edge = k == 0 || k == road.lanes;
    s += "<line x1=\"" + num(c.sx(0)) + "\" y1=\"" + num(y) + "\" x2=\"" + num(c.sx(road.length)) + "\" y2=\"" +
         num(y) + "\" stroke=\"#555555\" stroke-width=\"" + (edge ? "2" : "1") + "\"" +
         (edge ? "" : " stroke-dasharray=\"8,6\"") + "/>\n";
  }
  s += "<circle cx=\"" + num(c.sx(scenario.goal.x())) + "\" cy=\"" + num(c.sy(scenario.goal.y())) + "\" r=\"" +
       num(scenario.planner.goal_radius * kScale) + "\" fill=\"#2ca02c\" fill-opacity=\"0.25\"/>\n";

  for (const auto& o : scenario.obstacles) {
    s += polygon(c, o.footprint(), "fill=\"#7f7f7f\" stroke=\"black\" stroke-width=\"1\"");
  }
  if (!trace.cycles.empty()) {
    const auto& est = trace.cycles.front().perceived;
    for (const auto& o : est) {
      s += polygon(c, o.footprint(), "fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\"");
    }
    s += "<g transform=\"translate(" + num(kMargin) + " " + num(kMargin + kScale * c.y_top) + ") scale(" +
         num(kScale) + " " + num(-kScale) + ")\">\n";
    for (const auto& o : est) s += svg_ellipse(o);
    s += "</g>\n";
  }

  std::string pts = num(c.sx(trace.start.x)) + "," + num(c.sy(trace.start.y));
  for (const auto& st : trace.executed) pts += " " + num(c.sx(st.x)) + "," + num(c.sy(st.y));
  s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"2\"/>\n";
  s += "</svg>\n";
  return s;
}

std::string format_sweep_csv(std::span<const SweepCell> cells) {
  static const char* names[] = {"x", "y", "z", "h", "w", "l", "theta"};
  std::string out = "distance_m,azimuth_deg,detections";
  for (const char* n : names) out += std::string(",var_") + n;
  for (const char* n : names) out += std::string(",se_") + n;
  out += '\n';
  for (const auto& cell : cells) {
    out += num(cell.distance) + ',' + num(cell.azimuth * 180.0 / kPi) + ',' + std::to_string(cell.detections);
    for (double v : cell.mean_var) out += ',' + num(v);
    for (double v : cell.stderr_var) out += ',' + num(v);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void write_report(const std::filesystem::path& dir, const Scenario& scenario, const BatchResult& batch) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string());
  }
  write_text_file(dir / "metrics.csv", format_metrics_csv(batch.metrics));
  write_text_file(dir / "trace.jsonl", format_trace_jsonl(batch.trials));
  for (const auto& t : batch.trials) {
    const auto name = to_string(t.mode) + "_trial_" + std::to_string(t.trial) + ".svg";
    write_text_file(dir / name, render_svg(scenario, t.trace));
  }
}

}  // namespace chance_rrt
