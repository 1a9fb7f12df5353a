#pragma once

#include <functional>
#include <random>
#include <vector>

#include "tscf/core.hpp"
#include "tscf/models.hpp"

namespace tscf::testing {

inline ChangeMask random_mask(std::mt19937_64& gen, MaskKind kind, std::size_t length,
                              std::size_t channels, double density) {
  ChangeMask m(kind, length, channels);
  std::bernoulli_distribution bit(density);
  for (std::size_t i = 0; i < m.positions(); ++i) m.set_flat(i, bit(gen));
  return m;
}

inline TimeSeriesInstance random_instance(std::mt19937_64& gen, std::size_t length,
                                          std::size_t channels,
                                          std::optional<ClassId> label = std::nullopt) {
  std::normal_distribution<double> normal;
  std::vector<double> v(length * channels);
  for (double& x : v) x = normal(gen);
  return {length, channels, std::move(v), label};
}

inline TimeSeriesInstance series(std::vector<double> values) {
  const auto n = values.size();
  return {n, 1, std::move(values)};
}

/// Classifier backed by a plain function of one instance.
class FunctionClassifier final : public ClassifierModel {
 public:
  using Fn = std::function<ProbabilityVector(const TimeSeriesInstance&)>;
  FunctionClassifier(std::size_t classes, std::size_t length, std::size_t channels, Fn fn)
      : classes_(classes), length_(length), channels_(channels), fn_(std::move(fn)) {}

  std::vector<ProbabilityVector> predict_proba(
      std::span<const TimeSeriesInstance> batch) const override {
    std::vector<ProbabilityVector> out;
    for (const auto& x : batch) out.push_back(fn_(x));
    return out;
  }
  using ClassifierModel::predict_proba;
  std::size_t class_count() const override { return classes_; }
  std::size_t length() const override { return length_; }
  std::size_t channels() const override { return channels_; }

 private:
  std::size_t classes_, length_, channels_;
  Fn fn_;
};

class FunctionScorer final : public OutlierScorer {
 public:
  FunctionScorer(std::function<double(const TimeSeriesInstance&)> fn, double e_max)
      : fn_(std::move(fn)), e_max_(e_max) {}
  double reconstruction_error(const TimeSeriesInstance& x) const override { return fn_(x); }
  double e_max() const override { return e_max_; }

 private:
  std::function<double(const TimeSeriesInstance&)> fn_;
  double e_max_;
};

inline FunctionScorer zero_scorer() {
  return FunctionScorer([](const TimeSeriesInstance&) { return 0.0; }, 1.0);
}

/// Two classes; class 1 once the mean value exceeds `threshold`.
inline FunctionClassifier mean_threshold_classifier(std::size_t length, std::size_t channels,
                                                    double threshold) {
  return FunctionClassifier(2, length, channels, [threshold](const TimeSeriesInstance& x) {
    double mean = 0.0;
    for (double v : x.flat()) mean += v;
    mean /= static_cast<double>(x.size());
    const double p1 = mean > threshold ? 0.75 : 0.25;
    return ProbabilityVector{1.0 - p1, p1};
  });
}

}  // namespace tscf::testing

namespace tscf::testing {

/// Class 1 once channel 0 has at least 40% of its cells equal to one (zero
/// original, all-ones donor) spread over at least L/6 separate runs. Below that
/// the class-1 probability falls as more cells change.
inline FunctionClassifier escalation_classifier(std::size_t length, std::size_t channels) {
  return FunctionClassifier(2, length, channels, [length](const TimeSeriesInstance& x) {
    std::size_t ones = 0, runs = 0;
    for (std::size_t t = 0; t < length; ++t) {
      const bool on = x.at(t, 0) > 0.5;
      ones += on;
      runs += on && (t == 0 || x.at(t - 1, 0) <= 0.5);
    }
    const double frac = static_cast<double>(ones) / static_cast<double>(length);
    const bool valid = 10 * ones >= 4 * length && 6 * runs >= length;
    const double p1 = valid ? 0.9 : 0.45 * (1.0 - frac);
    return ProbabilityVector{1.0 - p1, p1};
  });
}

}  // namespace tscf::testing
