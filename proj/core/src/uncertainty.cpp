#include "chance_rrt/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chance_rrt/errors.hpp"
#include "chance_rrt/geometry.hpp"

namespace chance_rrt {

BoxParams BoxParams::from_vector(const BoxVector& v) {
  return {v[kX], v[kY], v[kZ], v[kH], v[kW], v[kL], v[kTheta]};
}

namespace {

void validate(std::span<const DetectionSample> samples) {
  if (samples.empty()) throw DomainError("detection sample set is empty");
  const std::size_t classes = samples.front().class_scores.size();
  for (const auto& s : samples) {
    if (s.class_scores.size() != classes) {
      throw DomainError("samples disagree on class count");
    }
    double sum = 0.0;
    for (double p : s.class_scores) {
      if (!(p >= 0.0 && p <= 1.0)) throw DomainError("class score outside [0, 1]");
      sum += p;
    }
    if (classes > 0 && std::abs(sum - 1.0) > 1e-9) {
      throw DomainError("class scores do not sum to 1");
    }
    for (double lv : s.log_variance) {
      if (!std::isfinite(lv)) throw DomainError("non-finite log variance");
    }
    for (double v : s.box.as_vector()) {
      if (!std::isfinite(v)) throw DomainError("non-finite box parameter");
    }
  }
}

double circular_mean(std::span<const DetectionSample> samples) {
  double s = 0.0;
  double c = 0.0;
  for (const auto& d : samples) {
    s += std::sin(d.box.theta);
    c += std::cos(d.box.theta);
  }
  const double n = static_cast<double>(samples.size());
  return normalize_angle(std::atan2(s / n, c / n));
}

std::vector<double> mean_scores(std::span<const DetectionSample> samples) {
  std::vector<double> mean(samples.front().class_scores.size(), 0.0);
  for (const auto& s : samples) {
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += s.class_scores[c];
  }
  for (double& m : mean) m /= static_cast<double>(samples.size());
  return mean;
}

double clamp_variance(double v) {
  if (v < -1e-9) throw DomainError("negative variance " + std::to_string(v));
  return std::max(v, 0.0);
}

}  // namespace

double entropy(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

BoxParams predictive_mean(std::span<const DetectionSample> samples) {
  validate(samples);
  BoxVector acc{};
  for (const auto& s : samples) {
    const BoxVector v = s.box.as_vector();
    for (std::size_t k = 0; k < kTheta; ++k) acc[k] += v[k];
  }
  for (double& a : acc) a /= static_cast<double>(samples.size());
  acc[kTheta] = circular_mean(samples);
  return BoxParams::from_vector(acc);
}

PredictiveVariance predictive_variance(std::span<const DetectionSample> samples) {
  const BoxVector mean = predictive_mean(samples).as_vector();
  const double n = static_cast<double>(samples.size());

  // Two-pass form of E[y^2] - E[y]^2; identical in exact arithmetic and free
  // of cancellation for boxes far from the origin.
  PredictiveVariance out;
  for (const auto& s : samples) {
    const BoxVector v = s.box.as_vector();
    for (std::size_t k = 0; k < kBoxDims; ++k) {
      const double dev = k == kTheta ? normalize_angle(v[k] - mean[k]) : v[k] - mean[k];
      out.epistemic[k] += dev * dev;
      out.aleatoric[k] += std::exp(s.log_variance[k]);
    }
  }
  for (std::size_t k = 0; k < kBoxDims; ++k) {
    out.epistemic[k] = clamp_variance(out.epistemic[k] / n);
    out.aleatoric[k] = clamp_variance(out.aleatoric[k] / n);
    out.total[k] = out.epistemic[k] + out.aleatoric[k];
  }
  return out;
}

double predictive_entropy(std::span<const DetectionSample> samples) {
  validate(samples);
  const auto mean = mean_scores(samples);
  return entropy(mean);
}

double mutual_information(std::span<const DetectionSample> samples) {
  const double pe = predictive_entropy(samples);
  double expected = 0.0;
  for (const auto& s : samples) expected += entropy(s.class_scores);
  expected /= static_cast<double>(samples.size());
  return std::max(pe - expected, 0.0);
}

DetectionBelief fuse_detection(std::span<const DetectionSample> samples) {
  DetectionBelief b;
  b.mean = predictive_mean(samples);
  const auto var = predictive_variance(samples);
  b.var_epistemic = var.epistemic;
  b.var_aleatoric = var.aleatoric;
  b.var_total = var.total;
  b.predictive_entropy = predictive_entropy(samples);
  b.mutual_information = mutual_information(samples);
  b.sample_count = static_cast<int>(samples.size());
  return b;
}

AttenuatedLoss attenuated_loss(std::span<const double> residuals,
                               std::span<const double> log_vars) {
  if (residuals.size() != log_vars.size()) {
    throw DomainError("residual and log-variance lengths differ");
  }
  if (residuals.empty()) throw DomainError("attenuated loss needs at least one element");
  const double inv_d = 1.0 / static_cast<double>(residuals.size());
  AttenuatedLoss out;
  out.grad_log_var.resize(residuals.size());
  for (std::size_t d = 0; d < residuals.size(); ++d) {
    if (!std::isfinite(residuals[d]) || !std::isfinite(log_vars[d])) {
      throw DomainError("attenuated loss input is not finite");
    }
    const double weighted = 0.5 * std::exp(-log_vars[d]) * residuals[d] * residuals[d];
    out.loss += weighted + 0.5 * log_vars[d];
    out.grad_log_var[d] = inv_d * (0.5 - weighted);
  }
  out.loss *= inv_d;
  return out;
}

}  // namespace chance_rrt
