#include <cmath>

#include "chance_rrt/errors.hpp"
#include "chance_rrt/erf.hpp"
#include "chance_rrt/risk.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chance_rrt;
using testing::Gen;

TEST_CASE("erf basic values") {
  CHECK(erf_rational(0.0) == 0.0);
  CHECK(std::abs(erf_rational(1.0) - 0.8427008) <= 1e-6);
  CHECK(std::abs(testing::erf_series(1.0) - 0.8427007929497149) <= 1e-15);
  CHECK(erf_rational(6.0) == 1.0);
  CHECK(erf_rational(-7.5) == -1.0);
  CHECK(erf_lookup(9.0) == 1.0);
}

TEST_CASE("erf is odd and monotone") {
  double prev = -1.0;
  for (int i = -8000; i <= 8000; ++i) {
    const double x = i * 1e-3;
    CHECK(erf_rational(-x) == -erf_rational(x));
    CHECK(erf_lookup(-x) == -erf_lookup(x));
    const double v = erf_rational(x);
    CHECK(v >= prev);
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
    prev = v;
  }
}

TEST_CASE("erf matches the Maclaurin series on [-4, 4]") {
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = -4.0 + 8.0 * i / 9999.0;
    worst = std::max(worst, std::abs(erf_rational(x) - testing::erf_series(x)));
  }
  CHECK(worst <= 1.5e-7);
}

TEST_CASE("lookup table agrees with the rational form") {
  double worst = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double x = -7.0 + 14.0 * i / 20000.0;
    worst = std::max(worst, std::abs(erf_lookup(x) - erf_rational(x)));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("constraint_satisfaction_prob examples") {
  const Vec2 a(1.0, 0.0);
  Gen g(41);
  for (int i = 0; i < 20; ++i) {
    const Mat2 cov = g.psd(0.01, 2.0);
    const Vec2 z(3.0, g.uniform(-5, 5));
    CHECK(constraint_satisfaction_prob(a, 3.0, z, cov) == 0.5);
  }
  const Mat2 cov = Mat2::Identity() * 0.25;  // sigma = 0.5 along a
  CHECK(std::abs(constraint_satisfaction_prob(a, 1.5, Vec2(0, 0), cov) - testing::normal_cdf(3.0)) <= 1e-7);
  CHECK(std::abs(constraint_satisfaction_prob(a, -1.5, Vec2(0, 0), cov) - testing::normal_cdf(-3.0)) <= 1e-7);
  CHECK(constraint_satisfaction_prob(a, 1.5, Vec2(0, 0), cov) == doctest::Approx(0.99865).epsilon(1e-5));
}

TEST_CASE("constraint_satisfaction_prob degenerate variance and bad input") {
  const Vec2 a(0.0, 1.0);
  CHECK(constraint_satisfaction_prob(a, 1.0, Vec2(0, 0), Mat2::Zero()) == 1.0);
  CHECK(constraint_satisfaction_prob(a, -1.0, Vec2(0, 0), Mat2::Zero()) == 0.0);
  CHECK(constraint_satisfaction_prob(a, 0.0, Vec2(0, 0), Mat2::Zero()) == 0.5);
  Mat2 bad = Mat2::Identity();
  bad(0, 0) = -0.5;
  CHECK_THROWS_AS(constraint_satisfaction_prob(a, 1.0, Vec2(0, 0), bad), DomainError);
  CHECK_THROWS_AS(constraint_satisfaction_prob(Vec2(2.0, 0.0), 1.0, Vec2(0, 0), Mat2::Identity()), DomainError);
}

TEST_CASE("scaling the covariance pulls the probability toward one half") {
  Gen g(42);
  for (int i = 0; i < 300; ++i) {
    const double angle = g.uniform(-kPi, kPi);
    const Vec2 a(std::cos(angle), std::sin(angle));
    const Vec2 z(g.uniform(-3, 3), g.uniform(-3, 3));
    const double b = g.uniform(-3, 3);
    const Mat2 cov = g.psd(0.05, 1.0);
    double prev = constraint_satisfaction_prob(a, b, z, cov);
    for (double s : {1.5, 2.0, 4.0, 8.0}) {
      const double p = constraint_satisfaction_prob(a, b, z, cov * s * s);
      CHECK(std::abs(p - 0.5) <= std::abs(prev - 0.5) + 1e-15);
      prev = p;
    }
  }
}

TEST_CASE("collision_prob_obstacle examples") {
  MotionConfig motion;
  const auto poly = ego_polygon({0, 0, 0, 0}, motion);
  const auto far = testing::obstacle(Vec2(30, 0), 0.3, 2.25, 0.9);
  CHECK(collision_prob_obstacle(poly, far, Mat2::Zero()) == 0.0);

  const auto same = testing::obstacle(Vec2(0, 0), 0.0, 2.25, 0.9, Mat2::Identity() * 1e-6);
  CHECK(collision_prob_obstacle(poly, same, Mat2::Zero()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inflation adds the support of the obstacle box") {
  MotionConfig motion;
  const auto poly = ego_polygon({1, 2, 0.4, 0}, motion);
  Gen g(43);
  for (int i = 0; i < 100; ++i) {
    const auto ob = testing::obstacle(Vec2(g.uniform(-5, 5), g.uniform(-5, 5)), g.uniform(-3, 3),
                                      g.uniform(0.5, 3), g.uniform(0.5, 2));
    const auto inflated = inflate_for(poly, ob);
    // Support by corner enumeration.
    const auto corners = ob.footprint().corners();
    for (std::size_t k = 0; k < 4; ++k) {
      double support = -1e9;
      for (const auto& c : corners) support = std::max(support, poly.faces[k].normal.dot(c - ob.center));
      CHECK(inflated.faces[k].offset - poly.faces[k].offset == doctest::Approx(support).epsilon(1e-12));
    }
  }
}

TEST_CASE("total_risk sums per obstacle and clamps") {
  MotionConfig motion;
  const auto poly = ego_polygon({0, 0, 0, 0}, motion);
  const Mat2 ego = Mat2::Identity() * 0.01;
  CHECK(total_risk(poly, ego, {}) == 0.0);
  const auto ob = testing::obstacle(Vec2(6.0, 2.0), 0.2, 2.25, 0.9, Mat2::Identity() * 0.3);
  const std::vector<ObstacleBelief> one{ob};
  const std::vector<ObstacleBelief> two{ob, ob};
  const double single = collision_prob_obstacle(poly, ob, ego);
  REQUIRE(single < 0.5);
  CHECK(total_risk(poly, ego, one) == single);
  CHECK(total_risk(poly, ego, two) == 2.0 * single);
  const auto inside = testing::obstacle(Vec2(0, 0), 0.0, 2.25, 0.9, Mat2::Identity() * 1e-6);
  const std::vector<ObstacleBelief> heavy{inside, inside, inside};
  CHECK(total_risk(poly, ego, heavy) == 1.0);
}

TEST_CASE("total_risk is translation invariant") {
  MotionConfig motion;
  Gen g(44);
  for (int i = 0; i < 100; ++i) {
    const EgoState s{g.uniform(-3, 3), g.uniform(-3, 3), g.uniform(-kPi, kPi), 0};
    std::vector<ObstacleBelief> obs;
    for (int k = 0; k < 3; ++k) {
      obs.push_back(testing::obstacle(Vec2(g.uniform(-8, 8), g.uniform(-8, 8)), g.uniform(-3, 3), 2.0, 0.9,
                                      g.psd(0.01, 1.0)));
    }
    const Mat2 ego = g.psd(0.0, 0.1);
    const double base = total_risk(ego_polygon(s, motion), ego, obs);
    const Vec2 shift(g.uniform(-50, 50), g.uniform(-50, 50));
    EgoState t = s;
    t.x += shift.x();
    t.y += shift.y();
    for (auto& o : obs) o.center += shift;
    CHECK(std::abs(total_risk(ego_polygon(t, motion), ego, obs) - base) <= 1e-12);
  }
}

TEST_CASE("moving an obstacle outward along its binding face never raises the risk") {
  MotionConfig motion;
  Gen g(45);
  const EgoState s{0, 0, 0.3, 0};
  const auto poly = ego_polygon(s, motion);
  for (int i = 0; i < 100; ++i) {
    auto ob = testing::obstacle(Vec2(g.uniform(-6, 6), g.uniform(-6, 6)), g.uniform(-3, 3), 2.0, 0.9,
                                g.psd(0.01, 1.0));
    const auto inflated = inflate_for(poly, ob);
    std::size_t binding = 0;
    double best = 2.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const double p = constraint_satisfaction_prob(inflated.faces[k].normal, inflated.faces[k].offset, ob.center,
                                                    ob.covariance);
      if (p < best) {
        best = p;
        binding = k;
      }
    }
    double prev = collision_prob_obstacle(poly, ob, Mat2::Zero());
    for (int k = 0; k < 10; ++k) {
      ob.center += 0.2 * poly.faces[binding].normal;
      const double p = collision_prob_obstacle(poly, ob, Mat2::Zero());
      CHECK(p <= prev + 1e-15);
      prev = p;
    }
  }
}

TEST_CASE("check_chance_constraint is strict") {
  RiskConfig cfg;
  CHECK(check_chance_constraint(0.0, cfg));
  CHECK_FALSE(check_chance_constraint(cfg.risk_bound(), cfg));
  CHECK(check_chance_constraint(0.005, cfg));
  cfg.p_safe = 1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("mc_collision_oracle examples") {
  MotionConfig motion;
  const auto poly = ego_polygon({0, 0, 0, 0}, motion);
  const auto inside = testing::obstacle(Vec2(0.5, 0.2), 0.0, 2.25, 0.9);
  auto est = mc_collision_oracle(poly, inside, Mat2::Zero(), 2000, 1);
  CHECK(est.estimate == 1.0);
  CHECK(est.standard_error == 0.0);

  const auto outside = testing::obstacle(Vec2(20, 0), 0.0, 2.25, 0.9);
  est = mc_collision_oracle(poly, outside, Mat2::Zero(), 2000, 1);
  CHECK(est.estimate == 0.0);

  // Obstacle center exactly on the inflated front face, lateral faces far away.
  const double front = 0.5 * motion.ego_length + 2.25;
  const auto edge = testing::obstacle(Vec2(front, 0), 0.0, 2.25, 0.9, Mat2::Zero());
  MotionConfig wide = motion;
  wide.ego_width = 40.0;
  wide.ego_length = 40.0;
  const auto big = ego_polygon({-20.0 + 0.5 * motion.ego_length, 0, 0, 0}, wide);
  est = mc_collision_oracle(big, edge, Mat2::Identity(), 100000, 7);
  CHECK(std::abs(est.estimate - 0.5) <= 3.0 * est.standard_error);

  CHECK_THROWS_AS(mc_collision_oracle(poly, inside, Mat2::Zero(), 999, 1), DomainError);
  CHECK(mc_collision_oracle(poly, edge, Mat2::Identity(), 5000, 3).estimate ==
        mc_collision_oracle(poly, edge, Mat2::Identity(), 5000, 3).estimate);
}

TEST_CASE("analytic bound dominates the Monte Carlo estimate") {
  MotionConfig motion;
  Gen g(46);
  for (int i = 0; i < 30; ++i) {
    const EgoState s{0, 0, g.uniform(-kPi, kPi), 0};
    const auto poly = ego_polygon(s, motion);
    const auto ob = testing::obstacle(Vec2(g.uniform(-6, 6), g.uniform(-6, 6)), g.uniform(-kPi, kPi),
                                      g.uniform(1.5, 2.5), g.uniform(0.7, 1.1), g.psd(0.01, 1.0));
    const Mat2 ego = g.psd(0.0, 0.05);
    const double analytic = collision_prob_obstacle(poly, ob, ego);
    const auto mc = mc_collision_oracle(poly, ob, ego, 20000, g.bits());
    CHECK(analytic >= mc.estimate - 3.0 * mc.standard_error);
  }
}
