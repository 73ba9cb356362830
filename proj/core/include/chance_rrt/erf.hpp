#pragma once

namespace chance_rrt {

enum class ErfMethod { kRational, kLookupTable };

/// Gauss error function via Cody's rational Chebyshev approximations.
/// Odd, monotone, and exactly +/-1 for |x| >= 6.
double erf_rational(double x);

/// Linear interpolation in a table of erf_rational sampled every 1e-3 on
/// [0, 6]; odd extension for negative arguments.
double erf_lookup(double x);

double erf(double x, ErfMethod method = ErfMethod::kRational);

}  // namespace chance_rrt
