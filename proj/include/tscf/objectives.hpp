#pragma once

#include <array>
#include <span>
#include <vector>

#include "tscf/core.hpp"
#include "tscf/models.hpp"

namespace tscf {

inline constexpr std::size_t kObjectiveCount = 4;

/// Objectives, all maximised:
///   o1 = p(x', y_nun)                       adversarial
///   o2 = -|M|_0 / (L C)                     sparsity
///   o3 = -(NoS / (L C / 2))^gamma           contiguity
///   o4 = -max(0, e(x') - e(x)) / e_max      plausibility
/// Each carries -nu when x' is not classified as y_nun.
struct ObjectiveVector {
  double o1 = 0.0;
  double o2 = 0.0;
  double o3 = 0.0;
  double o4 = 0.0;
  bool valid = false;

  std::array<double, kObjectiveCount> values() const { return {o1, o2, o3, o4}; }
  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

struct ObjectiveConfig {
  double gamma = 0.25;
  double nu = 100.0;

  /// Throws InvalidArgument unless gamma in (0, 1] and nu > 0.
  void validate() const;
};

/// max(0, err(x') - err(x)).
double increase_in_outlier_score(const TimeSeriesInstance& x, const TimeSeriesInstance& x_prime,
                                 const OutlierScorer& scorer);

/// Mask-only terms, computed on the broadcast L x C form.
double sparsity_objective(const ChangeMask& mask, std::size_t channels);
double contiguity_objective(const ChangeMask& mask, std::size_t channels, double gamma);

ObjectiveVector evaluate_objectives(const TimeSeriesInstance& x, const ChangeMask& mask,
                                    const TimeSeriesInstance& nun, ClassId y_nun,
                                    const ClassifierModel& classifier, const OutlierScorer& scorer,
                                    const ObjectiveConfig& cfg);

/// Population-level evaluation for one explanation problem. Caches err(x) and
/// batches classifier calls. With threads > 1 the batch is split into
/// contiguous chunks evaluated concurrently; results keep input order.
class ObjectiveEvaluator {
 public:
  ObjectiveEvaluator(const TimeSeriesInstance& x, const TimeSeriesInstance& nun, ClassId y_nun,
                     const ClassifierModel& classifier, const OutlierScorer& scorer,
                     ObjectiveConfig cfg, std::size_t threads = 1);

  ObjectiveVector evaluate(const ChangeMask& mask) const;
  std::vector<ObjectiveVector> evaluate(std::span<const ChangeMask> masks) const;

  TimeSeriesInstance counterfactual(const ChangeMask& mask) const;

  const TimeSeriesInstance& original() const noexcept { return x_; }
  const TimeSeriesInstance& nun() const noexcept { return nun_; }
  ClassId target_class() const noexcept { return y_nun_; }
  const ObjectiveConfig& config() const noexcept { return cfg_; }

 private:
  void evaluate_range(std::span<const ChangeMask> masks, std::span<ObjectiveVector> out) const;

  TimeSeriesInstance x_;
  TimeSeriesInstance nun_;
  ClassId y_nun_;
  const ClassifierModel& classifier_;
  const OutlierScorer& scorer_;
  ObjectiveConfig cfg_;
  std::size_t threads_;
  double original_error_;
};

/// a dominates b: a_i >= b_i for every i and a_j > b_j for some j.
bool dominates(std::span<const double> a, std::span<const double> b);
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

}  // namespace tscf
