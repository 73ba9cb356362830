#pragma once

// Shared fixtures, random generators and independent oracles for the tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "chance_rrt/dynamics.hpp"
#include "chance_rrt/geometry.hpp"
#include "chance_rrt/spatial.hpp"
#include "chance_rrt/uncertainty.hpp"

namespace testing {

using chance_rrt::Mat2;
using chance_rrt::Vec2;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::uint64_t bits() { return rng_(); }

  /// Random symmetric PSD matrix with eigenvalues in [lo, hi].
  Mat2 psd(double lo, double hi) {
    const double angle = uniform(-chance_rrt::kPi, chance_rrt::kPi);
    const Mat2 r = chance_rrt::rotation(angle);
    Mat2 d = Mat2::Zero();
    d(0, 0) = uniform(lo, hi);
    d(1, 1) = uniform(lo, hi);
    return chance_rrt::symmetrized(r * d * r.transpose());
  }

  std::vector<double> simplex(int classes) {
    std::vector<double> p(static_cast<std::size_t>(classes));
    double sum = 0.0;
    for (auto& v : p) sum += (v = uniform(0.01, 1.0));
    for (auto& v : p) v /= sum;
    return p;
  }

  chance_rrt::DetectionSample sample(int classes) {
    chance_rrt::DetectionSample s;
    s.box.x = uniform(-50, 50);
    s.box.y = uniform(-50, 50);
    s.box.z = uniform(0, 2);
    s.box.h = uniform(1, 2);
    s.box.w = uniform(1.5, 2.5);
    s.box.l = uniform(3, 5);
    s.box.theta = uniform(-0.3, 0.3);
    for (auto& v : s.log_variance) v = uniform(-6, 1);
    s.class_scores = simplex(classes);
    return s;
  }

  std::vector<chance_rrt::DetectionSample> samples(int t, int classes) {
    std::vector<chance_rrt::DetectionSample> out;
    for (int i = 0; i < t; ++i) out.push_back(sample(classes));
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

/// erf by its Maclaurin series in long double: 2/sqrt(pi) sum (-1)^n x^(2n+1) / (n! (2n+1)).
inline double erf_series(double x, int max_terms = 400) {
  const long double xl = x;
  const long double x2 = xl * xl;
  long double term = xl;  // x^(2n+1) (-1)^n / n!
  long double sum = 0.0L;
  for (int n = 0; n < max_terms; ++n) {
    const long double contrib = term / (2 * n + 1);
    sum += contrib;
    if (n > 5 && std::fabs(static_cast<double>(contrib)) < 1e-22) break;
    term *= -x2 / (n + 1);
  }
  return static_cast<double>(sum * 2.0L / std::sqrt(static_cast<long double>(chance_rrt::kPi)));
}

inline double normal_cdf(double x) { return 0.5 * (1.0 + erf_series(x / std::sqrt(2.0))); }

/// Deterministic rectangle obstacle with a given covariance.
inline chance_rrt::ObstacleBelief obstacle(const Vec2& c, double heading, double hl, double hw,
                                           const Mat2& cov = Mat2::Zero()) {
  chance_rrt::ObstacleBelief ob;
  ob.center = c;
  ob.heading = heading;
  ob.half_length = ob.semi_axis_lon = hl;
  ob.half_width = ob.semi_axis_lat = hw;
  ob.covariance = cov;
  return ob;
}

inline chance_rrt::DetectionSample one_hot_sample(const chance_rrt::BoxParams& box, int classes, int hot,
                                                  double log_var = -30.0) {
  chance_rrt::DetectionSample s;
  s.box = box;
  s.log_variance.fill(log_var);
  s.class_scores.assign(static_cast<std::size_t>(classes), 0.0);
  s.class_scores[static_cast<std::size_t>(hot)] = 1.0;
  return s;
}

}  // namespace testing
