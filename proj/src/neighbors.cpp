#include "tscf/neighbors.hpp"

#include <limits>

namespace tscf {

NunResult find_nun(const LabeledDataset& train, std::span<const ClassId> candidate_classes,
                   const TimeSeriesInstance& x, ClassId predicted_class,
                   std::optional<ClassId> target_class) {
  if (train.empty()) {
    throw Error(ErrorCode::NoUnlikeNeighbor, "empty training set");
  }
  if (candidate_classes.size() != train.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one class per training instance expected");
  }
  if (target_class && *target_class == predicted_class) {
    throw Error(ErrorCode::InvalidArgument, "target class equals the query's predicted class");
  }
  std::optional<std::size_t> best;
  double best_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < train.size(); ++i) {
    const ClassId cls = candidate_classes[i];
    const bool eligible = target_class ? cls == *target_class : cls != predicted_class;
    if (!eligible) continue;
    const double d = euclidean_distance(x, train[i]);
    if (!best || d < best_distance) {
      best = i;
      best_distance = d;
    }
  }
  if (!best) {
    throw Error(ErrorCode::NoUnlikeNeighbor, "no training instance passes the class filter");
  }
  return {train[*best], candidate_classes[*best], best_distance, *best};
}

NunResult find_nun(const LabeledDataset& train, const TimeSeriesInstance& x,
                   ClassId predicted_class, const ClassifierModel& classifier,
                   const NunOptions& options) {
  if (options.target_class &&
      (*options.target_class < 0 ||
       static_cast<std::size_t>(*options.target_class) >= classifier.class_count())) {
    throw Error(ErrorCode::InvalidArgument, "target class out of range");
  }
  std::vector<ClassId> classes;
  if (options.by_label) {
    classes.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) classes.push_back(train.label(i));
  } else {
    classes = classifier.predict(std::span<const TimeSeriesInstance>(train.instances()));
  }
  return find_nun(train, classes, x, predicted_class, options.target_class);
}

}  // namespace tscf
