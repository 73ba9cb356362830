#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "chance_rrt/dynamics.hpp"
#include "chance_rrt/erf.hpp"
#include "chance_rrt/perception.hpp"
#include "chance_rrt/planner.hpp"
#include "chance_rrt/risk.hpp"
#include "chance_rrt/uncertainty.hpp"

using namespace chance_rrt;

namespace {

ObstacleBelief car(double x, double y, double var) {
  ObstacleBelief ob;
  ob.center = Vec2(x, y);
  ob.half_length = ob.semi_axis_lon = 2.25;
  ob.half_width = ob.semi_axis_lat = 0.9;
  ob.covariance = Mat2::Identity() * var;
  return ob;
}

std::vector<double> erf_inputs() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  std::vector<double> xs(4096);
  for (auto& x : xs) x = u(rng);
  return xs;
}

template <typename F>
void run_erf(benchmark::State& state, F f) {
  const auto xs = erf_inputs();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f(xs[i++ & 4095]));
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_ErfRational(benchmark::State& state) { run_erf(state, erf_rational); }
void BM_ErfLookup(benchmark::State& state) { run_erf(state, erf_lookup); }
void BM_ErfStd(benchmark::State& state) { run_erf(state, [](double x) { return std::erf(x); }); }

void BM_CollisionProbObstacle(benchmark::State& state) {
  const auto method = state.range(0) ? ErfMethod::kLookupTable : ErfMethod::kRational;
  const auto poly = ego_polygon(EgoState{0, 0, 0.2, 5}, MotionConfig{});
  const auto ob = car(4.5, 1.0, 0.3);
  const Mat2 ego = Mat2::Identity() * 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(collision_prob_obstacle(poly, ob, ego, method));
  }
}

void BM_FuseDetection(benchmark::State& state) {
  SensorNoiseProfile p;
  GroundTruthObstacle g;
  g.position = Vec2(25.0, 3.0);
  const std::vector<GroundTruthObstacle> truth{g};
  const auto sets = sense(EgoState{0, 0, 0, 0}, truth, p, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fuse_detection(sets.at(0).samples));
  }
}

void BM_ExpandTree(benchmark::State& state) {
  PlannerConfig cfg;
  cfg.mode = static_cast<PlannerMode>(state.range(0));
  cfg.sample_region = cfg.drivable_region = {0.0, 80.0, 0.0, 10.5};
  const MotionConfig motion;
  const RiskConfig risk;
  std::vector<ObstacleBelief> obs{car(22, 1.75, 0.05), car(32, 5.25, 0.08), car(42, 8.75, 0.03), car(50, 1.75, 0.1)};
  obs[1].velocity = Vec2(1.0, 0.0);
  obs = baseline_mode_transform(obs, cfg);
  ExpansionBudget budget;
  budget.max_iterations = 200;
  std::mt19937_64 rng(7);
  for (auto _ : state) {
    PlanTree tree(StateBelief{{5, 1.75, 0, 5}, motion.initial_covariance}, Vec2(70.0, 8.75), 2.0);
    const auto stats = expand_tree(tree, obs, cfg, motion, risk, budget, rng);
    benchmark::DoNotOptimize(stats.nodes_added);
  }
}

}  // namespace

BENCHMARK(BM_ErfRational);
BENCHMARK(BM_ErfLookup);
BENCHMARK(BM_ErfStd);
BENCHMARK(BM_CollisionProbObstacle)->Arg(0)->Arg(1);
BENCHMARK(BM_FuseDetection);
BENCHMARK(BM_ExpandTree)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
