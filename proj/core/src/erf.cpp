#include "chance_rrt/erf.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace chance_rrt {

namespace {

constexpr double kSaturation = 6.0;
constexpr double kTableStep = 1e-3;

// W. J. Cody, "Rational Chebyshev approximations for the error function",
// Math. Comp. 23 (1969). Coefficients from the netlib CALERF routine.
constexpr std::array<double, 5> kA{3.16112374387056560e00, 1.13864154151050156e02,
                                   3.77485237685302021e02, 3.20937758913846947e03,
                                   1.85777706184603153e-1};
constexpr std::array<double, 4> kB{2.36012909523441209e01, 2.44024637934444173e02,
                                   1.28261652607737228e03, 2.84423683343917062e03};
constexpr std::array<double, 9> kC{5.64188496988670089e-1, 8.88314979438837594e00,
                                   6.61191906371416295e01, 2.98635138197400131e02,
                                   8.81952221241769090e02, 1.71204761263407058e03,
                                   2.05107837782607147e03, 1.23033935479799725e03,
                                   2.15311535474403846e-8};
constexpr std::array<double, 8> kD{1.57449261107098347e01, 1.17693950891312499e02,
                                   5.37181101862009858e02, 1.62138957456669019e03,
                                   3.29079923573345963e03, 4.36261909014324716e03,
                                   3.43936767414372164e03, 1.23033935480374942e03};
constexpr std::array<double, 6> kP{3.05326634961232344e-1, 3.60344899949804439e-1,
                                   1.25781726111229246e-1, 1.60837851487422766e-2,
                                   6.58749161529837803e-4, 1.63153871373020978e-2};
constexpr std::array<double, 5> kQ{2.56852019228982242e00, 1.87295284992346047e00,
                                   5.27905102951428412e-1, 6.05183413124413191e-2,
                                   2.33520497626869185e-3};
constexpr double kInvSqrtPi = 5.6418958354775628695e-1;

// erfc(y) * exp(y^2) scaled back, for y > 0.46875
double erfc_positive(double y) {
  double r;
  if (y <= 4.0) {
    double num = kC[8] * y;
    double den = y;
    for (int i = 0; i < 7; ++i) {
      num = (num + kC[i]) * y;
      den = (den + kD[i]) * y;
    }
    r = (num + kC[7]) / (den + kD[7]);
  } else {
    const double ysq = 1.0 / (y * y);
    double num = kP[5] * ysq;
    double den = ysq;
    for (int i = 0; i < 4; ++i) {
      num = (num + kP[i]) * ysq;
      den = (den + kQ[i]) * ysq;
    }
    r = ysq * (num + kP[4]) / (den + kQ[4]);
    r = (kInvSqrtPi - r) / y;
  }
  // exp(-y^2) split to keep the exponent accurate
  const double ysq = std::trunc(y * 16.0) / 16.0;
  const double del = (y - ysq) * (y + ysq);
  return std::exp(-ysq * ysq) * std::exp(-del) * r;
}

const std::vector<double>& erf_table() {
  static const std::vector<double> table = [] {
    const auto n = static_cast<std::size_t>(std::lround(kSaturation / kTableStep)) + 1;
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = erf_rational(static_cast<double>(i) * kTableStep);
    return t;
  }();
  return table;
}

}  // namespace

double erf_rational(double x) {
  const double y = std::abs(x);
  if (y >= kSaturation) return x > 0.0 ? 1.0 : -1.0;
  if (y <= 0.46875) {
    const double ysq = y > 1.11e-16 ? y * y : 0.0;
    double num = kA[4] * ysq;
    double den = ysq;
    for (int i = 0; i < 3; ++i) {
      num = (num + kA[i]) * ysq;
      den = (den + kB[i]) * ysq;
    }
    return x * (num + kA[3]) / (den + kB[3]);
  }
  const double r = 0.5 - erfc_positive(y) + 0.5;
  return x < 0.0 ? -r : r;
}

double erf_lookup(double x) {
  const double y = std::abs(x);
  if (y >= kSaturation) return x > 0.0 ? 1.0 : -1.0;
  const auto& table = erf_table();
  const double pos = y / kTableStep;
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  const double v = table[i] + frac * (table[i + 1] - table[i]);
  return x < 0.0 ? -v : v;
}

double erf(double x, ErfMethod method) {
  return method == ErfMethod::kLookupTable ? erf_lookup(x) : erf_rational(x);
}

}  // namespace chance_rrt
