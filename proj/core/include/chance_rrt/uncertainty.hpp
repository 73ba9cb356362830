#pragma once

// Fusion of stochastic (MC-dropout style) detector passes into epistemic,
// aleatoric and total uncertainty, plus the classification uncertainty
// metrics and the attenuated regression loss used to learn aleatoric noise.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace chance_rrt {

inline constexpr std::size_t kBoxDims = 7;

/// Per-element vector over (x, y, z, h, w, l, theta).
using BoxVector = std::array<double, kBoxDims>;

/// Index of each element in a BoxVector.
enum BoxElement : std::size_t { kX = 0, kY, kZ, kH, kW, kL, kTheta };

struct BoxParams {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double h = 1.0;
  double w = 1.0;
  double l = 1.0;
  double theta = 0.0;

  BoxVector as_vector() const { return {x, y, z, h, w, l, theta}; }
  static BoxParams from_vector(const BoxVector& v);
};

/// One stochastic forward pass.
struct DetectionSample {
  BoxParams box;
  /// Natural log of the per-element aleatoric variance.
  BoxVector log_variance{};
  /// Probability simplex over classes.
  std::vector<double> class_scores;
};

struct DetectionBelief {
  BoxParams mean;
  BoxVector var_epistemic{};
  BoxVector var_aleatoric{};
  BoxVector var_total{};
  double predictive_entropy = 0.0;
  double mutual_information = 0.0;
  int sample_count = 0;
};

struct PredictiveVariance {
  BoxVector epistemic{};
  BoxVector aleatoric{};
  BoxVector total{};
};

struct AttenuatedLoss {
  double loss = 0.0;
  std::vector<double> grad_log_var;
};

/// Elementwise mean; yaw by circular mean. Throws DomainError on empty input.
BoxParams predictive_mean(std::span<const DetectionSample> samples);

/// Population variance across passes (epistemic) plus the mean of exp(lambda)
/// (aleatoric). Yaw deviations are wrapped about the circular mean.
PredictiveVariance predictive_variance(std::span<const DetectionSample> samples);

/// Entropy (nats) of the pass-averaged class distribution.
double predictive_entropy(std::span<const DetectionSample> samples);

/// Predictive entropy minus the mean per-pass entropy, clamped at zero.
double mutual_information(std::span<const DetectionSample> samples);

/// All of the above in one belief.
DetectionBelief fuse_detection(std::span<const DetectionSample> samples);

/// loss = (1/D) sum_d [ 0.5 exp(-lambda_d) r_d^2 + 0.5 lambda_d ] and its
/// gradient with respect to lambda.
AttenuatedLoss attenuated_loss(std::span<const double> residuals,
                               std::span<const double> log_vars);

/// Shannon entropy in nats; zero-probability terms contribute nothing.
double entropy(std::span<const double> probabilities);

}  // namespace chance_rrt
