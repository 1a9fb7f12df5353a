#include "tscf/models.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace tscf {

ProbabilityVector ClassifierModel::predict_proba(const TimeSeriesInstance& x) const {
  return predict_proba(std::span<const TimeSeriesInstance>(&x, 1)).front();
}

ClassId ClassifierModel::predict(const TimeSeriesInstance& x) const {
  return argmax(predict_proba(x));
}

std::vector<ClassId> ClassifierModel::predict(std::span<const TimeSeriesInstance> batch) const {
  std::vector<ClassId> out;
  out.reserve(batch.size());
  for (const auto& p : predict_proba(batch)) out.push_back(argmax(p));
  return out;
}

ClassId argmax(std::span<const double> proba) {
  if (proba.empty()) {
    throw Error(ErrorCode::InvalidArgument, "argmax of an empty probability vector");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < proba.size(); ++i) {
    if (proba[i] > proba[best]) best = i;
  }
  return static_cast<ClassId>(best);
}

namespace {

void check_batch(std::span<const TimeSeriesInstance> batch, std::size_t length,
                 std::size_t channels) {
  for (const auto& x : batch) {
    if (x.length() != length || x.channels() != channels) {
      throw Error(ErrorCode::DimensionMismatch, "instance shape does not match the model");
    }
  }
}

}  // namespace

// --- nearest centroid -------------------------------------------------------

NearestCentroidClassifier::NearestCentroidClassifier(std::vector<TimeSeriesInstance> centroids,
                                                     double temperature)
    : centroids_(std::move(centroids)), temperature_(temperature) {
  if (centroids_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "nearest centroid model without centroids");
  }
  if (!(temperature_ > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "temperature must be positive");
  }
  for (auto& c : centroids_) {
    if (!c.same_shape(centroids_.front())) {
      throw Error(ErrorCode::DimensionMismatch, "centroids differ in shape");
    }
    c.set_label(std::nullopt);
  }
}

std::vector<ProbabilityVector> NearestCentroidClassifier::predict_proba(
    std::span<const TimeSeriesInstance> batch) const {
  check_batch(batch, length(), channels());
  std::vector<ProbabilityVector> out;
  out.reserve(batch.size());
  std::vector<double> logits(centroids_.size());
  for (const auto& x : batch) {
    for (std::size_t k = 0; k < centroids_.size(); ++k) {
      logits[k] = -euclidean_distance(x, centroids_[k]) / temperature_;
    }
    const double top = *std::max_element(logits.begin(), logits.end());
    ProbabilityVector p(logits.size());
    double total = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
      p[k] = std::exp(logits[k] - top);
      total += p[k];
    }
    for (double& v : p) v /= total;
    out.push_back(std::move(p));
  }
  return out;
}

NearestCentroidClassifier fit_nearest_centroid(const LabeledDataset& train, double temperature) {
  const std::size_t k_count = train.class_count();
  const std::size_t cells = train.length() * train.channels();
  std::vector<std::vector<double>> sums(k_count, std::vector<double>(cells, 0.0));
  std::vector<std::size_t> counts(k_count, 0);
  for (const auto& inst : train.instances()) {
    const auto k = static_cast<std::size_t>(*inst.label());
    auto v = inst.flat();
    for (std::size_t i = 0; i < cells; ++i) sums[k][i] += v[i];
    ++counts[k];
  }
  std::vector<TimeSeriesInstance> centroids;
  centroids.reserve(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    if (counts[k] == 0) {
      throw Error(ErrorCode::EmptyClass, "class " + std::to_string(k) + " has no instances");
    }
    for (double& v : sums[k]) v /= static_cast<double>(counts[k]);
    centroids.emplace_back(train.length(), train.channels(), std::move(sums[k]));
  }
  return {std::move(centroids), temperature};
}

// --- k nearest neighbours ---------------------------------------------------

KnnClassifier::KnnClassifier(LabeledDataset train, std::size_t k)
    : train_(std::move(train)), k_(k) {
  if (k_ == 0 || k_ > train_.size()) {
    throw Error(ErrorCode::InvalidArgument, "k must lie in [1, training size]");
  }
}

std::vector<ProbabilityVector> KnnClassifier::predict_proba(
    std::span<const TimeSeriesInstance> batch) const {
  check_batch(batch, length(), channels());
  std::vector<ProbabilityVector> out;
  out.reserve(batch.size());
  std::vector<std::pair<double, std::size_t>> dist(train_.size());
  for (const auto& x : batch) {
    for (std::size_t i = 0; i < train_.size(); ++i) {
      dist[i] = {euclidean_distance(x, train_[i]), i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
    ProbabilityVector p(class_count(), 0.0);
    for (std::size_t j = 0; j < k_; ++j) {
      p[static_cast<std::size_t>(train_.label(dist[j].second))] += 1.0;
    }
    for (double& v : p) v /= static_cast<double>(k_);
    out.push_back(std::move(p));
  }
  return out;
}

KnnClassifier fit_knn(const LabeledDataset& train, std::size_t k) { return {train, k}; }

// --- linear reconstruction scorer -------------------------------------------

LinearReconstructionScorer::LinearReconstructionScorer(std::size_t length, std::size_t channels,
                                                       std::vector<double> mean,
                                                       std::vector<std::vector<double>> components,
                                                       double e_max)
    : length_(length),
      channels_(channels),
      mean_(std::move(mean)),
      components_(std::move(components)),
      e_max_(e_max) {
  const std::size_t dim = length_ * channels_;
  if (dim == 0 || mean_.size() != dim) {
    throw Error(ErrorCode::DimensionMismatch, "scorer mean does not match L * C");
  }
  if (components_.empty() || components_.size() >= dim) {
    throw Error(ErrorCode::InvalidArgument, "component count must lie in [1, L * C)");
  }
  for (const auto& row : components_) {
    if (row.size() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "component row does not match L * C");
    }
  }
  if (!(e_max_ > 0.0) || !std::isfinite(e_max_)) {
    throw Error(ErrorCode::InvalidArgument, "e_max must be positive and finite");
  }
}

void LinearReconstructionScorer::check_shape(const TimeSeriesInstance& x) const {
  if (x.length() != length_ || x.channels() != channels_) {
    throw Error(ErrorCode::DimensionMismatch, "instance shape does not match the scorer");
  }
}

TimeSeriesInstance LinearReconstructionScorer::reconstruct(const TimeSeriesInstance& x) const {
  check_shape(x);
  const std::size_t dim = mean_.size();
  auto v = x.flat();
  std::vector<double> centred(dim);
  for (std::size_t i = 0; i < dim; ++i) centred[i] = v[i] - mean_[i];
  std::vector<double> out = mean_;
  for (const auto& row : components_) {
    const double coef = std::inner_product(row.begin(), row.end(), centred.begin(), 0.0);
    for (std::size_t i = 0; i < dim; ++i) out[i] += coef * row[i];
  }
  return {length_, channels_, std::move(out)};
}

double LinearReconstructionScorer::reconstruction_error(const TimeSeriesInstance& x) const {
  return euclidean_distance(x, reconstruct(x));
}

std::size_t default_component_count(std::size_t length, std::size_t channels) {
  return std::min<std::size_t>(8, length * channels - 1);
}

LinearReconstructionScorer fit_linear_scorer(const LabeledDataset& train, std::size_t d) {
  const std::size_t dim = train.length() * train.channels();
  if (d == 0 || d >= dim) {
    throw Error(ErrorCode::InvalidArgument, "component count must lie in [1, L * C)");
  }
  {
    std::set<std::vector<double>> distinct;
    for (const auto& inst : train.instances()) {
      distinct.emplace(inst.flat().begin(), inst.flat().end());
      if (distinct.size() >= 2) break;
    }
    if (distinct.size() < 2) {
      throw Error(ErrorCode::DegenerateData, "fewer than two distinct training instances");
    }
  }

  const auto n = static_cast<Eigen::Index>(train.size());
  const auto p = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd data(n, p);
  for (Eigen::Index r = 0; r < n; ++r) {
    auto v = train[static_cast<std::size_t>(r)].flat();
    for (Eigen::Index j = 0; j < p; ++j) data(r, j) = v[static_cast<std::size_t>(j)];
  }
  const Eigen::RowVectorXd mean = data.colwise().mean();
  data.rowwise() -= mean;

  // Scatter-matrix eigendecomposition; eigenvalues come back in ascending order.
  const Eigen::MatrixXd scatter = data.transpose() * data;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scatter);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::DegenerateData, "eigendecomposition failed");
  }
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  std::vector<std::vector<double>> components;
  components.reserve(d);
  for (std::size_t k = 0; k < d; ++k) {
    const Eigen::Index col = p - 1 - static_cast<Eigen::Index>(k);
    std::vector<double> row(dim);
    for (Eigen::Index j = 0; j < p; ++j) row[static_cast<std::size_t>(j)] = vectors(j, col);
    // Sign convention: first clearly nonzero coordinate is positive.
    const auto lead = std::find_if(row.begin(), row.end(),
                                   [](double v) { return std::abs(v) > 1e-12; });
    if (lead != row.end() && *lead < 0.0) {
      for (double& v : row) v = -v;
    }
    components.push_back(std::move(row));
  }

  std::vector<double> mean_vec(mean.data(), mean.data() + p);
  // Placeholder e_max so the scorer can compute its own training errors.
  LinearReconstructionScorer probe(train.length(), train.channels(), mean_vec, components, 1.0);
  double e_max = 0.0;
  for (const auto& inst : train.instances()) {
    e_max = std::max(e_max, probe.reconstruction_error(inst));
  }
  if (e_max <= 1e-8) e_max = 1.0;
  return {train.length(), train.channels(), std::move(mean_vec), std::move(components), e_max};
}

std::vector<double> training_errors(const OutlierScorer& scorer, const LabeledDataset& train) {
  std::vector<double> out;
  out.reserve(train.size());
  for (const auto& inst : train.instances()) out.push_back(scorer.reconstruction_error(inst));
  return out;
}

}  // namespace tscf
