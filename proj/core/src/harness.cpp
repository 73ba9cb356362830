#include "chance_rrt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "chance_rrt/perception.hpp"
#include "chance_rrt/uncertainty.hpp"

namespace chance_rrt {

ModeMetrics summarize(PlannerMode mode, std::span<const RunTrace> traces, const RiskConfig& risk) {
  ModeMetrics m;
  m.mode = mode;
  m.trials = static_cast<int>(traces.size());
  if (traces.empty()) return m;

  double risk_sum = 0.0;
  std::size_t steps = 0;
  int s1 = 0, s2 = 0, s3 = 0, hits = 0;
  double waypoints = 0.0, length = 0.0;
  for (const auto& t : traces) {
    const bool goal = t.status == RunStatus::kGoalReached && !t.collided;
    const bool within = std::all_of(t.step_risk.begin(), t.step_risk.end(),
                                    [&](double d) { return check_chance_constraint(d, risk); });
    s1 += t.deadlocked ? 0 : 1;
    s2 += goal ? 1 : 0;
    s3 += goal && within ? 1 : 0;
    hits += t.collided ? 1 : 0;
    for (double d : t.step_risk) {
      m.risk_max = std::max(m.risk_max, d);
      risk_sum += d;
    }
    steps += t.step_risk.size();
    if (goal) {
      waypoints += static_cast<double>(t.executed.size());
      length += t.length();
    }
  }
  const double n = static_cast<double>(traces.size());
  m.rate_succ_1 = s1 / n;
  m.rate_succ_2 = s2 / n;
  m.rate_succ_3 = s3 / n;
  m.collision_rate = hits / n;
  m.risk_avg = steps ? risk_sum / static_cast<double>(steps) : 0.0;
  // Path-shape metrics cover completed trips only; a run that stalls early is not a short path.
  m.n_waypoints = s2 ? waypoints / s2 : 0.0;
  m.traj_length_m = s2 ? length / s2 : 0.0;
  return m;
}

int thread_cap_from_env() {
  if (const char* env = std::getenv("CHANCE_RRT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 1024L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

BatchResult run_batch(const Scenario& scenario, std::span<const PlannerMode> modes, int trials,
                      std::uint64_t base_seed, int threads) {
  BatchResult out;
  if (trials <= 0 || modes.empty()) {
    return out;
  }
  const std::size_t total = modes.size() * static_cast<std::size_t>(trials);
  out.trials.resize(total);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    for (int i = 0; i < trials; ++i) {
      auto& slot = out.trials[m * static_cast<std::size_t>(trials) + static_cast<std::size_t>(i)];
      slot.mode = modes[m];
      slot.trial = i;
      slot.seed = base_seed + static_cast<std::uint64_t>(i);
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      auto& slot = out.trials[k];
      try {
        PlannerConfig cfg = scenario.planner;
        cfg.mode = slot.mode;
        cfg.seed = slot.seed;
        slot.trace = execute(scenario, cfg, scenario.motion, scenario.risk, slot.seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const int cap = threads > 0 ? threads : thread_cap_from_env();
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(cap), total);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t m = 0; m < modes.size(); ++m) {
    std::vector<RunTrace> traces;
    for (int i = 0; i < trials; ++i) {
      traces.push_back(out.trials[m * static_cast<std::size_t>(trials) + static_cast<std::size_t>(i)].trace);
    }
    out.metrics.push_back(summarize(modes[m], traces, scenario.risk));
  }
  return out;
}

std::vector<SweepCell> sense_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SensorNoiseProfile profile = cfg.profile;
  profile.misdetect_rate = 0.0;
  profile.occluded_misdetect_rate = 0.0;
  profile.clutter_rate = 0.0;

  const EgoState ego{};
  std::vector<SweepCell> cells;
  for (std::size_t di = 0; di < cfg.distances.size(); ++di) {
    const double d = cfg.distances[di];
    for (double phi : cfg.azimuths) {
      SweepCell cell;
      cell.distance = d;
      cell.azimuth = phi;
      BoxVector sum{}, sum_sq{};
      GroundTruthObstacle vehicle;
      vehicle.position = Vec2(d * std::cos(phi), d * std::sin(phi));
      const std::vector<GroundTruthObstacle> truth{vehicle};
      for (int f = 0; f < cfg.frames; ++f) {
        const std::uint64_t seed = cfg.seed * 0x100000001B3ULL + di * 1000003ULL + static_cast<std::uint64_t>(f);
        const auto sets = sense(ego, truth, profile, seed);
        if (sets.empty()) continue;
        const auto belief = fuse_detection(sets.front().samples);
        for (std::size_t e = 0; e < kBoxDims; ++e) {
          sum[e] += belief.var_total[e];
          sum_sq[e] += belief.var_total[e] * belief.var_total[e];
        }
        ++cell.detections;
      }
      if (cell.detections > 0) {
        const double n = cell.detections;
        for (std::size_t e = 0; e < kBoxDims; ++e) {
          cell.mean_var[e] = sum[e] / n;
          const double var = n > 1 ? std::max(0.0, (sum_sq[e] - n * cell.mean_var[e] * cell.mean_var[e]) / (n - 1)) : 0.0;
          cell.stderr_var[e] = std::sqrt(var / n);
        }
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

}  // namespace chance_rrt
