#include "tscf/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "tscf/neighbors.hpp"
#include "tscf/rng.hpp"

namespace tscf {

using nlohmann::json;

double metric_validity(std::span<const MetricsRecord> records) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "validity of an empty record set");
  const auto valid = std::count_if(records.begin(), records.end(),
                                   [](const MetricsRecord& r) { return r.valid; });
  return static_cast<double>(valid) / static_cast<double>(records.size());
}

double metric_proximity(const TimeSeriesInstance& x, const TimeSeriesInstance& x_prime) {
  return euclidean_distance(x, x_prime);
}

double metric_sparsity(const ChangeMask& mask, std::size_t channels) {
  return -sparsity_objective(mask, channels);
}

double metric_os_scaled(const TimeSeriesInstance& x_prime, const OutlierScorer& scorer,
                        std::span<const double> train_errors) {
  if (train_errors.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no training errors to scale against");
  }
  const auto [lo, hi] = std::minmax_element(train_errors.begin(), train_errors.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return 0.0;
  return (scorer.reconstruction_error(x_prime) - *lo) / range;
}

double metric_sparsity_nos_mean(const ChangeMask& mask, std::size_t channels) {
  const double cells = static_cast<double>(mask.length() * channels);
  const std::size_t runs = count_subsequences(mask) * (mask.kind() == MaskKind::Common ? channels : 1);
  return 0.5 * metric_sparsity(mask, channels) + 0.5 * (static_cast<double>(runs) / (cells / 2.0));
}

Explanation baseline_full_swap(const TimeSeriesInstance& x, const TimeSeriesInstance& nun) {
  if (!x.same_shape(nun)) {
    throw Error(ErrorCode::DimensionMismatch, "original and donor differ in shape");
  }
  TimeSeriesInstance cf = nun;
  cf.set_label(std::nullopt);
  return {ChangeMask::ones(MaskKind::Independent, x.length(), x.channels()), std::move(cf)};
}

MetricsRecord measure(std::size_t instance_id, const TimeSeriesInstance& x,
                      const Explanation& explanation, ClassId target,
                      const ClassifierModel& classifier, const OutlierScorer& scorer,
                      std::span<const double> train_errors) {
  MetricsRecord r;
  r.instance_id = instance_id;
  r.valid = classifier.predict(explanation.counterfactual) == target;
  if (!r.valid) return r;
  const std::size_t channels = x.channels();
  r.proximity = metric_proximity(x, explanation.counterfactual);
  r.sparsity = metric_sparsity(explanation.mask, channels);
  r.nos = count_subsequences(to_independent(explanation.mask, channels));
  r.os_scaled = metric_os_scaled(explanation.counterfactual, scorer, train_errors);
  r.sparsity_nos_mean = metric_sparsity_nos_mean(explanation.mask, channels);
  return r;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::MultiSpace: return "multispace";
    case Method::FullSwap: return "full_swap";
  }
  return "unknown";
}

std::vector<std::size_t> sample_instances(std::size_t split_size, std::size_t n_eval,
                                          std::uint64_t seed) {
  std::vector<std::size_t> ids(split_size);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  const std::size_t take = std::min(n_eval, split_size);
  RngStream rng(seed);
  // Partial Fisher-Yates: the first `take` slots are a uniform sample.
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.uniform_index(split_size - i);
    std::swap(ids[i], ids[j]);
  }
  ids.resize(take);
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

struct MetricSpec {
  const char* name;
  bool higher_is_better;
};

constexpr MetricSpec kMetrics[] = {
    {"validity", true},      {"proximity", false}, {"sparsity", false},
    {"nos", false},          {"os_scaled", false}, {"sparsity_nos_mean", false},
};

template <typename Get>
json mean_of(std::span<const MetricsRecord> records, Get get) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (auto v = get(r)) {
      total += static_cast<double>(*v);
      ++n;
    }
  }
  if (n == 0) return nullptr;
  return total / static_cast<double>(n);
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  if (v) return *v;
  return nullptr;
}

}  // namespace

json aggregate(std::span<const MetricsRecord> records) {
  json out;
  out["count"] = records.size();
  out["valid_count"] = std::count_if(records.begin(), records.end(),
                                     [](const MetricsRecord& r) { return r.valid; });
  out["validity"] = records.empty() ? json(nullptr) : json(metric_validity(records));
  out["proximity"] = mean_of(records, [](const MetricsRecord& r) { return r.proximity; });
  out["sparsity"] = mean_of(records, [](const MetricsRecord& r) { return r.sparsity; });
  out["nos"] = mean_of(records, [](const MetricsRecord& r) { return r.nos; });
  out["os_scaled"] = mean_of(records, [](const MetricsRecord& r) { return r.os_scaled; });
  out["sparsity_nos_mean"] =
      mean_of(records, [](const MetricsRecord& r) { return r.sparsity_nos_mean; });
  out["wall_time_s"] =
      mean_of(records, [](const MetricsRecord& r) { return std::optional<double>(r.wall_time_s); });
  return out;
}

json rank_methods(std::span<const MethodReport> methods) {
  json rows = json::array();
  for (const auto& metric : kMetrics) {
    json row;
    row["metric"] = metric.name;
    json ranks = json::object();
    for (const auto& m : methods) {
      const auto& mine = m.aggregates.at(metric.name);
      if (mine.is_null()) {
        ranks[method_name(m.method)] = nullptr;
        continue;
      }
      const double v = mine.get<double>();
      std::size_t better = 0;
      for (const auto& other : methods) {
        const auto& theirs = other.aggregates.at(metric.name);
        if (theirs.is_null()) continue;
        const double o = theirs.get<double>();
        if (metric.higher_is_better ? o > v : o < v) ++better;
      }
      ranks[method_name(m.method)] = better + 1;
    }
    row["ranks"] = std::move(ranks);
    rows.push_back(std::move(row));
  }
  return rows;
}

BatchReport evaluate_batch(const LabeledDataset& split, const LabeledDataset& train,
                           std::span<const Method> methods, const ClassifierModel& classifier,
                           const OutlierScorer& scorer, const RunConfig& cfg,
                           const BatchOptions& options) {
  options.weights.validate();
  BatchReport report;
  report.selected = sample_instances(split.size(), options.n_eval, options.seed);
  const auto train_errs = training_errors(scorer, train);
  std::vector<ClassId> train_classes;
  if (cfg.nun.by_label) {
    for (std::size_t i = 0; i < train.size(); ++i) train_classes.push_back(train.label(i));
  } else {
    train_classes = classifier.predict(std::span<const TimeSeriesInstance>(train.instances()));
  }

  for (Method method : methods) {
    MethodReport mr;
    mr.method = method;
    mr.records.resize(report.selected.size());
    auto run_one = [&](std::size_t slot) {
      const std::size_t id = report.selected[slot];
      MetricsRecord& rec = mr.records[slot];
      const auto start = std::chrono::steady_clock::now();
      try {
        const TimeSeriesInstance& x = split[id];
        const ClassId original = classifier.predict(x);
        const NunResult nun = find_nun(train, train_classes, x, original, cfg.nun.target_class);
        Explanation expl;
        if (method == Method::MultiSpace) {
          RunConfig local = cfg;
          local.seed = cfg.seed + id;
          const auto result = run_multispace(x, nun, original, classifier, scorer, local);
          const auto& best = select_by_utility(result.front, options.weights);
          expl = {best.mask, best.counterfactual};
        } else {
          expl = baseline_full_swap(x, nun.neighbor);
        }
        rec = measure(id, x, expl, nun.target_class, classifier, scorer, train_errs);
      } catch (const std::exception& e) {
        rec = MetricsRecord{};
        rec.instance_id = id;
        rec.error = e.what();
      }
      rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    const std::size_t jobs =
        classifier.thread_safe() ? std::max<std::size_t>(1, options.jobs) : std::size_t{1};
    if (jobs == 1) {
      for (std::size_t s = 0; s < mr.records.size(); ++s) run_one(s);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < std::min(jobs, mr.records.size()); ++w) {
        pool.emplace_back([&] {
          for (std::size_t s = next++; s < mr.records.size(); s = next++) run_one(s);
        });
      }
    }
    mr.aggregates = aggregate(mr.records);
    report.methods.push_back(std::move(mr));
  }
  report.ranking = rank_methods(report.methods);
  return report;
}

json record_to_json(const MetricsRecord& r) {
  json out;
  out["instance_id"] = r.instance_id;
  out["valid"] = r.valid;
  out["proximity"] = optional_json(r.proximity);
  out["sparsity"] = optional_json(r.sparsity);
  out["nos"] = optional_json(r.nos);
  out["os_scaled"] = optional_json(r.os_scaled);
  out["sparsity_nos_mean"] = optional_json(r.sparsity_nos_mean);
  out["wall_time_s"] = r.wall_time_s;
  if (r.error) out["error"] = *r.error;
  return out;
}

json report_to_json(const BatchReport& report) {
  json methods = json::array();
  for (const auto& m : report.methods) {
    json records = json::array();
    for (const auto& r : m.records) records.push_back(record_to_json(r));
    methods.push_back({{"method", method_name(m.method)},
                       {"records", std::move(records)},
                       {"aggregates", m.aggregates}});
  }
  return {{"format_version", 1},
          {"selected", report.selected},
          {"methods", std::move(methods)},
          {"ranking", report.ranking}};
}

std::string report_to_csv(const BatchReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "method,instance_id,valid,proximity,sparsity,nos,os_scaled,sparsity_nos_mean,wall_time_s,"
        "error\n";
  auto put = [&os](const auto& v) {
    if (v) os << *v;
    os << ',';
  };
  for (const auto& m : report.methods) {
    for (const auto& r : m.records) {
      os << method_name(m.method) << ',' << r.instance_id << ',' << (r.valid ? 1 : 0) << ',';
      put(r.proximity);
      put(r.sparsity);
      put(r.nos);
      put(r.os_scaled);
      put(r.sparsity_nos_mean);
      os << r.wall_time_s << ',';
      if (r.error) {
        std::string e = *r.error;
        std::replace(e.begin(), e.end(), '"', '\'');
        os << '"' << e << '"';
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace tscf
