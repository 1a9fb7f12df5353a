#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "tscf/core.hpp"

namespace tscf {

using ProbabilityVector = std::vector<double>;

/// Black-box classifier. Implementations must return, per instance, K
/// non-negative probabilities summing to 1 and be deterministic.
class ClassifierModel {
 public:
  virtual ~ClassifierModel() = default;

  virtual std::vector<ProbabilityVector> predict_proba(
      std::span<const TimeSeriesInstance> batch) const = 0;

  virtual std::size_t class_count() const = 0;
  virtual std::size_t length() const = 0;
  virtual std::size_t channels() const = 0;

  /// False for models that must not be called from several threads at once.
  virtual bool thread_safe() const { return true; }

  ProbabilityVector predict_proba(const TimeSeriesInstance& x) const;
  ClassId predict(const TimeSeriesInstance& x) const;
  std::vector<ClassId> predict(std::span<const TimeSeriesInstance> batch) const;
};

/// Index of the largest probability; ties go to the lowest class id.
ClassId argmax(std::span<const double> proba);

class OutlierScorer {
 public:
  virtual ~OutlierScorer() = default;
  virtual double reconstruction_error(const TimeSeriesInstance& x) const = 0;
  virtual double e_max() const = 0;
};

class NearestCentroidClassifier final : public ClassifierModel {
 public:
  NearestCentroidClassifier(std::vector<TimeSeriesInstance> centroids, double temperature);

  std::vector<ProbabilityVector> predict_proba(
      std::span<const TimeSeriesInstance> batch) const override;
  using ClassifierModel::predict_proba;

  std::size_t class_count() const override { return centroids_.size(); }
  std::size_t length() const override { return centroids_.front().length(); }
  std::size_t channels() const override { return centroids_.front().channels(); }

  const std::vector<TimeSeriesInstance>& centroids() const noexcept { return centroids_; }
  double temperature() const noexcept { return temperature_; }

 private:
  std::vector<TimeSeriesInstance> centroids_;
  double temperature_;
};

NearestCentroidClassifier fit_nearest_centroid(const LabeledDataset& train,
                                               double temperature = 1.0);

class KnnClassifier final : public ClassifierModel {
 public:
  KnnClassifier(LabeledDataset train, std::size_t k);

  std::vector<ProbabilityVector> predict_proba(
      std::span<const TimeSeriesInstance> batch) const override;
  using ClassifierModel::predict_proba;

  std::size_t class_count() const override { return train_.class_count(); }
  std::size_t length() const override { return train_.length(); }
  std::size_t channels() const override { return train_.channels(); }

  const LabeledDataset& train() const noexcept { return train_; }
  std::size_t k() const noexcept { return k_; }

 private:
  LabeledDataset train_;
  std::size_t k_;
};

KnnClassifier fit_knn(const LabeledDataset& train, std::size_t k = 5);

/// PCA stand-in for an autoencoder: reconstruction is the projection of the
/// centred input onto `d` principal directions.
class LinearReconstructionScorer final : public OutlierScorer {
 public:
  /// `components` holds d rows of length L*C (channel-major flattening).
  LinearReconstructionScorer(std::size_t length, std::size_t channels, std::vector<double> mean,
                             std::vector<std::vector<double>> components, double e_max);

  double reconstruction_error(const TimeSeriesInstance& x) const override;
  double e_max() const override { return e_max_; }

  TimeSeriesInstance reconstruct(const TimeSeriesInstance& x) const;

  std::size_t length() const noexcept { return length_; }
  std::size_t channels() const noexcept { return channels_; }
  const std::vector<double>& mean() const noexcept { return mean_; }
  const std::vector<std::vector<double>>& components() const noexcept { return components_; }

 private:
  void check_shape(const TimeSeriesInstance& x) const;

  std::size_t length_;
  std::size_t channels_;
  std::vector<double> mean_;
  std::vector<std::vector<double>> components_;
  double e_max_;
};

/// Harness default for the number of retained components.
std::size_t default_component_count(std::size_t length, std::size_t channels);

LinearReconstructionScorer fit_linear_scorer(const LabeledDataset& train, std::size_t d);

/// Reconstruction errors of every training instance, in dataset order.
std::vector<double> training_errors(const OutlierScorer& scorer, const LabeledDataset& train);

using LoadedModel = std::variant<NearestCentroidClassifier, KnnClassifier,
                                 LinearReconstructionScorer>;

inline constexpr int kModelFormatVersion = 1;

void save_model(const NearestCentroidClassifier& model, const std::filesystem::path& path);
void save_model(const KnnClassifier& model, const std::filesystem::path& path);
void save_model(const LinearReconstructionScorer& model, const std::filesystem::path& path);

/// Throws UnknownModelType, VersionMismatch or CorruptFile.
LoadedModel load_model(const std::filesystem::path& path);

std::unique_ptr<ClassifierModel> load_classifier(const std::filesystem::path& path);
std::unique_ptr<OutlierScorer> load_scorer(const std::filesystem::path& path);

}  // namespace tscf
