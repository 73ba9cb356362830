#include <cmath>

#include "chance_rrt/errors.hpp"
#include "chance_rrt/perception.hpp"
#include "chance_rrt/uncertainty.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chance_rrt;

namespace {

SensorNoiseProfile noiseless() {
  SensorNoiseProfile p;
  p.sigma0 = 0.0;
  p.k_dist = 0.0;
  p.k_azimuth = 0.0;
  p.theta_noise = 0.0;
  p.score_jitter = 0.0;
  p.log_variance_jitter = 0.0;
  return p;
}

GroundTruthObstacle car_at(int id, double x, double y, double heading = 0.0) {
  GroundTruthObstacle g;
  g.id = id;
  g.position = Vec2(x, y);
  g.heading = heading;
  return g;
}

// MI margin a clutter object must clear over a real one.
constexpr double kClutterMiMargin = 0.02;

}  // namespace

TEST_CASE("noiseless sensor reproduces the ground truth") {
  const EgoState ego{0, 0, 0, 0};
  const std::vector<GroundTruthObstacle> truth{car_at(1, 12.0, 3.0, 0.4), car_at(2, -20.0, -5.0, -2.0)};
  const auto sets = sense(ego, truth, noiseless(), 9);
  REQUIRE(sets.size() == 2);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& g = truth[i];
    CHECK(sets[i].truth_id == g.id);
    CHECK_FALSE(sets[i].clutter);
    REQUIRE(sets[i].samples.size() == 6);
    for (const auto& s : sets[i].samples) {
      CHECK(s.box.x == g.position.x());
      CHECK(s.box.y == g.position.y());
      CHECK(s.box.w == g.w);
      CHECK(s.box.l == g.l);
      CHECK(s.box.h == g.h);
      CHECK(s.box.theta == g.heading);
    }
    const auto fused = fuse_detection(sets[i].samples);
    for (double v : fused.var_epistemic) CHECK(v == 0.0);
  }
}

TEST_CASE("no detection beyond max_range") {
  SensorNoiseProfile p;
  p.max_range = 30.0;
  const EgoState ego{0, 0, 0, 0};
  const std::vector<GroundTruthObstacle> truth{car_at(1, 29.9, 0.0), car_at(2, 30.1, 0.0), car_at(3, 0.0, -45.0)};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto sets = sense(ego, truth, p, seed);
    REQUIRE(sets.size() == 1);
    CHECK(sets[0].truth_id == 1);
  }
}

TEST_CASE("sense is deterministic in its seed") {
  SensorNoiseProfile p;
  p.clutter_rate = 2.0;
  const EgoState ego{1, 2, 0.3, 4};
  const std::vector<GroundTruthObstacle> truth{car_at(1, 20, 5), car_at(2, 35, -3, 1.0)};
  for (std::uint64_t seed : {0ULL, 7ULL, 123456789ULL}) {
    const auto a = sense(ego, truth, p, seed);
    const auto b = sense(ego, truth, p, seed);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].clutter == b[i].clutter);
      REQUIRE(a[i].samples.size() == b[i].samples.size());
      for (std::size_t k = 0; k < a[i].samples.size(); ++k) {
        CHECK(a[i].samples[k].box.as_vector() == b[i].samples[k].box.as_vector());
        CHECK(a[i].samples[k].log_variance == b[i].samples[k].log_variance);
        CHECK(a[i].samples[k].class_scores == b[i].samples[k].class_scores);
      }
    }
  }
}

TEST_CASE("fused variance at 40 m dominates 10 m over 500 frames") {
  SensorNoiseProfile p;
  const EgoState ego{0, 0, 0, 0};
  const std::vector<GroundTruthObstacle> near{car_at(1, 10.0, 0.0)};
  const std::vector<GroundTruthObstacle> far{car_at(1, 40.0, 0.0)};
  BoxVector sum_near{}, sum_far{};
  for (std::uint64_t f = 0; f < 500; ++f) {
    const auto a = fuse_detection(sense(ego, near, p, f).at(0).samples);
    const auto b = fuse_detection(sense(ego, far, p, f).at(0).samples);
    for (std::size_t e = 0; e < kBoxDims; ++e) {
      sum_near[e] += a.var_total[e];
      sum_far[e] += b.var_total[e];
    }
  }
  for (std::size_t e = 0; e < kBoxDims; ++e) CHECK(sum_far[e] >= sum_near[e]);
}

TEST_CASE("clutter carries more mutual information than real objects") {
  SensorNoiseProfile p;
  p.clutter_rate = 1.0;
  const EgoState ego{0, 0, 0, 0};
  const std::vector<GroundTruthObstacle> truth{car_at(1, 25.0, 3.0)};
  int trials = 0, clear = 0;
  for (std::uint64_t seed = 0; trials < 500; ++seed) {
    const auto sets = sense(ego, truth, p, seed);
    double real_mi = -1.0;
    for (const auto& s : sets) {
      if (!s.clutter) real_mi = fuse_detection(s.samples).mutual_information;
    }
    REQUIRE(real_mi >= 0.0);
    for (const auto& s : sets) {
      if (!s.clutter || trials >= 500) continue;
      ++trials;
      if (fuse_detection(s.samples).mutual_information > real_mi + kClutterMiMargin) ++clear;
    }
  }
  CHECK(clear >= 475);
}

TEST_CASE("expected perturbation grows with distance") {
  SensorNoiseProfile p;
  const EgoState ego{0, 0, 0, 0};
  double prev_mean = 0.0, prev_se = 0.0;
  for (double d : {5.0, 15.0, 25.0, 35.0, 45.0}) {
    const std::vector<GroundTruthObstacle> truth{car_at(1, d, 0.0)};
    double sum = 0.0, sum_sq = 0.0;
    int n = 0;
    for (std::uint64_t f = 0; f < 300; ++f) {
      const auto sets = sense(ego, truth, p, f);
      for (const auto& s : sets.at(0).samples) {
        const double dev = std::hypot(s.box.x - d, s.box.y);
        sum += dev;
        sum_sq += dev * dev;
        ++n;
      }
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    CHECK(mean + 3.0 * std::hypot(se, prev_se) >= prev_mean);
    prev_mean = mean;
    prev_se = se;
  }
}

TEST_CASE("profile validation") {
  SensorNoiseProfile p;
  p.samples_per_detection = 0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = SensorNoiseProfile{};
  p.misdetect_rate = 1.5;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = SensorNoiseProfile{};
  p.clutter_rate = -0.1;
  CHECK_THROWS_AS(p.validate(), DomainError);
}
