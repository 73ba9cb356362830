#include "chance_rrt/perception.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "chance_rrt/errors.hpp"

namespace chance_rrt {

namespace {

constexpr double kMinLogVariance = -30.0;
constexpr double kMinDimension = 0.1;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double normal() { return normal_(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<int>(mean)(rng_);
  }
  int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

double log_variance(double sigma, double jitter, Sampler& s) {
  const double j = jitter * s.normal();
  if (sigma <= 0.0) return kMinLogVariance;
  return std::max(2.0 * std::log(sigma) + j, kMinLogVariance);
}

std::vector<double> concentrated_scores(int classes, int winner, double confidence) {
  std::vector<double> scores(static_cast<std::size_t>(classes), 0.0);
  if (classes == 1) {
    scores[0] = 1.0;
    return scores;
  }
  const double rest = (1.0 - confidence) / (classes - 1);
  for (int c = 0; c < classes; ++c) scores[static_cast<std::size_t>(c)] = c == winner ? confidence : rest;
  return scores;
}

bool occluded(const Vec2& eye, std::size_t target, std::span<const GroundTruthObstacle> truth) {
  const Vec2 goal = truth[target].position;
  const double range = (goal - eye).norm();
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (k == target) continue;
    if ((truth[k].position - eye).norm() >= range) continue;
    if (segment_intersects_box(eye, goal, truth[k].footprint())) return true;
  }
  return false;
}

}  // namespace

GroundTruthObstacle GroundTruthObstacle::at_time(double t) const {
  GroundTruthObstacle out = *this;
  out.position += t * velocity;
  return out;
}

void SensorNoiseProfile::validate() const {
  if (samples_per_detection < 1) throw DomainError("samples_per_detection must be >= 1");
  if (sigma0 < 0.0 || k_dist < 0.0 || k_azimuth < 0.0 || theta_noise < 0.0) {
    throw DomainError("noise coefficients must be non-negative");
  }
  for (double r : {misdetect_rate, occluded_misdetect_rate}) {
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("misdetection rates must lie in [0, 1]");
  }
  if (clutter_rate < 0.0) throw DomainError("clutter_rate must be non-negative");
  if (!(max_range > 0.0)) throw DomainError("max_range must be positive");
  if (num_classes < 1) throw DomainError("num_classes must be >= 1");
  if (!(confidence_base > 0.0 && confidence_base <= 1.0)) throw DomainError("confidence_base out of range");
  if (!(clutter_confidence_min > 0.0 && clutter_confidence_min <= clutter_confidence_max &&
        clutter_confidence_max <= 1.0)) {
    throw DomainError("clutter confidence range invalid");
  }
  if (score_jitter < 0.0 || log_variance_jitter < 0.0 || clutter_position_sigma < 0.0) {
    throw DomainError("jitter terms must be non-negative");
  }
}

double SensorNoiseProfile::sigma(double distance, double bearing) const {
  return sigma0 + k_dist * distance + k_azimuth * std::abs(std::sin(bearing));
}

double SensorNoiseProfile::yaw_sigma(double distance) const {
  return theta_noise * (1.0 + k_dist * distance / 10.0);
}

std::vector<DetectionSet> sense(const EgoState& ego, std::span<const GroundTruthObstacle> truth,
                                const SensorNoiseProfile& profile, std::uint64_t seed) {
  profile.validate();
  Sampler s(seed);
  std::vector<DetectionSet> out;
  const Vec2 eye = ego.position();
  const int T = profile.samples_per_detection;

  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& obj = truth[i];
    const Vec2 rel = obj.position - eye;
    const double d = rel.norm();
    if (d > profile.max_range) continue;

    const double drop = s.uniform(0.0, 1.0);
    const double rate = occluded(eye, i, truth) ? profile.occluded_misdetect_rate : profile.misdetect_rate;
    if (drop < rate) continue;

    const double bearing = std::atan2(rel.y(), rel.x()) - ego.heading;
    const double sig = profile.sigma(d, bearing);
    const double yaw_sig = profile.yaw_sigma(d);
    const double confidence = profile.confidence_base - profile.confidence_decay * d;

    DetectionSet set;
    set.truth_id = obj.id;
    set.velocity = obj.velocity;
    set.samples.reserve(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      DetectionSample sample;
      BoxVector v{obj.position.x(), obj.position.y(), 0.5 * obj.h, obj.h, obj.w, obj.l, obj.heading};
      for (std::size_t k = 0; k < kTheta; ++k) v[k] += sig * s.normal();
      for (std::size_t k = kH; k <= kL; ++k) v[k] = std::max(v[k], kMinDimension);
      v[kTheta] = normalize_angle(v[kTheta] + yaw_sig * s.normal());
      sample.box = BoxParams::from_vector(v);
      for (std::size_t k = 0; k < kTheta; ++k) {
        sample.log_variance[k] = log_variance(sig, profile.log_variance_jitter, s);
      }
      sample.log_variance[kTheta] = log_variance(yaw_sig, profile.log_variance_jitter, s);
      const double c = std::clamp(confidence + profile.score_jitter * s.normal(), 0.5, 1.0);
      sample.class_scores = concentrated_scores(profile.num_classes, 0, c);
      set.samples.push_back(std::move(sample));
    }
    out.push_back(std::move(set));
  }

  const int clutter = s.poisson(profile.clutter_rate);
  for (int k = 0; k < clutter; ++k) {
    const double d = s.uniform(std::min(5.0, profile.max_range), profile.max_range);
    const double bearing = s.uniform(-kPi, kPi) + ego.heading;
    const Vec2 c = eye + d * Vec2(std::cos(bearing), std::sin(bearing));
    const double l = s.uniform(2.0, 5.0);
    const double w = s.uniform(1.0, 2.5);
    const double heading = s.uniform(-kPi, kPi);
    const double spread = profile.clutter_position_sigma;

    DetectionSet set;
    set.clutter = true;
    for (int t = 0; t < T; ++t) {
      DetectionSample sample;
      BoxVector v{c.x(), c.y(), 0.75, 1.5, w, l, heading};
      for (std::size_t e = 0; e < kH; ++e) v[e] += spread * s.normal();
      for (std::size_t e = kH; e <= kL; ++e) v[e] = std::max(v[e] + 0.3 * spread * s.normal(), kMinDimension);
      v[kTheta] = normalize_angle(v[kTheta] + s.uniform(-0.3, 0.3));
      sample.box = BoxParams::from_vector(v);
      for (std::size_t e = 0; e < kTheta; ++e) {
        sample.log_variance[e] = log_variance(spread, profile.log_variance_jitter, s);
      }
      sample.log_variance[kTheta] = log_variance(0.17, profile.log_variance_jitter, s);
      const int winner = s.index(profile.num_classes);
      const double conf = s.uniform(profile.clutter_confidence_min, profile.clutter_confidence_max);
      sample.class_scores = concentrated_scores(profile.num_classes, winner, conf);
      set.samples.push_back(std::move(sample));
    }
    out.push_back(std::move(set));
  }
  return out;
}

}  // namespace chance_rrt
