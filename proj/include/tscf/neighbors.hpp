#pragma once

#include <optional>

#include "tscf/core.hpp"
#include "tscf/models.hpp"

namespace tscf {

struct NunOptions {
  /// Restrict candidates to this class instead of any class other than the
  /// query's prediction.
  std::optional<ClassId> target_class;
  /// Filter candidates by ground-truth label rather than by the classifier's
  /// prediction. The target class then becomes the neighbour's label.
  bool by_label = false;
};

struct NunResult {
  TimeSeriesInstance neighbor;
  ClassId target_class = 0;
  double distance = 0.0;
  std::size_t index = 0;
};

/// Nearest unlike neighbour by flattened Euclidean distance; ties go to the
/// lowest dataset index. Throws NoUnlikeNeighbor when no candidate passes the
/// class filter, InvalidArgument when the requested target equals the
/// query's class or is out of range.
NunResult find_nun(const LabeledDataset& train, const TimeSeriesInstance& x,
                   ClassId predicted_class, const ClassifierModel& classifier,
                   const NunOptions& options = {});

/// Same search against precomputed per-instance classes.
NunResult find_nun(const LabeledDataset& train, std::span<const ClassId> candidate_classes,
                   const TimeSeriesInstance& x, ClassId predicted_class,
                   std::optional<ClassId> target_class = std::nullopt);

}  // namespace tscf
