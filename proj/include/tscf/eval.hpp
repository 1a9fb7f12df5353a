#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tscf/core.hpp"
#include "tscf/driver.hpp"
#include "tscf/models.hpp"

namespace tscf {

/// Per-instance metrics. Value metrics are set only for valid explanations.
struct MetricsRecord {
  std::size_t instance_id = 0;
  bool valid = false;
  std::optional<double> proximity;
  std::optional<double> sparsity;
  std::optional<std::size_t> nos;
  std::optional<double> os_scaled;
  std::optional<double> sparsity_nos_mean;
  double wall_time_s = 0.0;
  std::optional<std::string> error;
};

double metric_validity(std::span<const MetricsRecord> records);
double metric_proximity(const TimeSeriesInstance& x, const TimeSeriesInstance& x_prime);
/// popcount of the broadcast mask over L * C.
double metric_sparsity(const ChangeMask& mask, std::size_t channels);
/// Min-max scaling against the training error range; 0 for a degenerate range.
double metric_os_scaled(const TimeSeriesInstance& x_prime, const OutlierScorer& scorer,
                        std::span<const double> train_errors);
double metric_sparsity_nos_mean(const ChangeMask& mask, std::size_t channels);

struct Explanation {
  ChangeMask mask;
  TimeSeriesInstance counterfactual;
};

Explanation baseline_full_swap(const TimeSeriesInstance& x, const TimeSeriesInstance& nun);

/// Metrics for one explanation. `target` is the class the counterfactual must
/// reach.
MetricsRecord measure(std::size_t instance_id, const TimeSeriesInstance& x,
                      const Explanation& explanation, ClassId target,
                      const ClassifierModel& classifier, const OutlierScorer& scorer,
                      std::span<const double> train_errors);

enum class Method { MultiSpace, FullSwap };

std::string method_name(Method m);

struct MethodReport {
  Method method = Method::MultiSpace;
  std::vector<MetricsRecord> records;
  /// Means over valid records (validity over all records).
  nlohmann::json aggregates;
};

struct BatchReport {
  std::vector<std::size_t> selected;
  std::vector<MethodReport> methods;
  /// One row per metric: method -> rank (1 is best, ties share the lower rank).
  nlohmann::json ranking;
};

struct BatchOptions {
  std::size_t n_eval = 100;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  UtilityWeights weights;
};

/// Deterministic subsample of min(n_eval, split size) instance ids, ascending.
std::vector<std::size_t> sample_instances(std::size_t split_size, std::size_t n_eval,
                                          std::uint64_t seed);

/// Aggregate means for a set of records.
nlohmann::json aggregate(std::span<const MetricsRecord> records);

/// Ranks methods per metric from their aggregates.
nlohmann::json rank_methods(std::span<const MethodReport> methods);

/// Runs each method on a seeded subsample of `split`. Per-instance failures
/// are recorded in MetricsRecord::error. Instance i runs with seed cfg.seed + i.
BatchReport evaluate_batch(const LabeledDataset& split, const LabeledDataset& train,
                           std::span<const Method> methods, const ClassifierModel& classifier,
                           const OutlierScorer& scorer, const RunConfig& cfg,
                           const BatchOptions& options);

nlohmann::json record_to_json(const MetricsRecord& r);
nlohmann::json report_to_json(const BatchReport& report);
/// One row per (method, instance).
std::string report_to_csv(const BatchReport& report);

}  // namespace tscf
