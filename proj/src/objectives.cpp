#include "tscf/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace tscf {

void ObjectiveConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "gamma must lie in (0, 1]");
  }
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw Error(ErrorCode::InvalidArgument, "nu must be positive");
  }
}

double increase_in_outlier_score(const TimeSeriesInstance& x, const TimeSeriesInstance& x_prime,
                                 const OutlierScorer& scorer) {
  return std::max(0.0, scorer.reconstruction_error(x_prime) - scorer.reconstruction_error(x));
}

namespace {

std::size_t broadcast_popcount(const ChangeMask& mask, std::size_t channels) {
  return mask.kind() == MaskKind::Common ? mask.popcount() * channels : mask.popcount();
}

std::size_t broadcast_runs(const ChangeMask& mask, std::size_t channels) {
  const std::size_t runs = count_subsequences(mask);
  return mask.kind() == MaskKind::Common ? runs * channels : runs;
}

}  // namespace

double sparsity_objective(const ChangeMask& mask, std::size_t channels) {
  const double cells = static_cast<double>(mask.length() * channels);
  return -static_cast<double>(broadcast_popcount(mask, channels)) / cells;
}

double contiguity_objective(const ChangeMask& mask, std::size_t channels, double gamma) {
  const double half_cells = static_cast<double>(mask.length() * channels) / 2.0;
  const double nos = static_cast<double>(broadcast_runs(mask, channels));
  return -std::pow(nos / half_cells, gamma);
}

namespace {

ObjectiveVector assemble(double proba_target, bool valid, const ChangeMask& mask,
                         std::size_t channels, double ios, double e_max,
                         const ObjectiveConfig& cfg) {
  const double penalty = valid ? 0.0 : cfg.nu;
  ObjectiveVector v;
  v.valid = valid;
  v.o1 = proba_target - penalty;
  v.o2 = sparsity_objective(mask, channels) - penalty;
  v.o3 = contiguity_objective(mask, channels, cfg.gamma) - penalty;
  v.o4 = -ios / e_max - penalty;
  return v;
}

}  // namespace

ObjectiveVector evaluate_objectives(const TimeSeriesInstance& x, const ChangeMask& mask,
                                    const TimeSeriesInstance& nun, ClassId y_nun,
                                    const ClassifierModel& classifier, const OutlierScorer& scorer,
                                    const ObjectiveConfig& cfg) {
  return ObjectiveEvaluator(x, nun, y_nun, classifier, scorer, cfg).evaluate(mask);
}

ObjectiveEvaluator::ObjectiveEvaluator(const TimeSeriesInstance& x, const TimeSeriesInstance& nun,
                                       ClassId y_nun, const ClassifierModel& classifier,
                                       const OutlierScorer& scorer, ObjectiveConfig cfg,
                                       std::size_t threads)
    : x_(x),
      nun_(nun),
      y_nun_(y_nun),
      classifier_(classifier),
      scorer_(scorer),
      cfg_(cfg),
      threads_(std::max<std::size_t>(1, threads)) {
  cfg_.validate();
  if (!x_.same_shape(nun_)) {
    throw Error(ErrorCode::DimensionMismatch, "original and donor differ in shape");
  }
  if (y_nun_ < 0 || static_cast<std::size_t>(y_nun_) >= classifier_.class_count()) {
    throw Error(ErrorCode::InvalidArgument, "target class out of range");
  }
  if (!(scorer_.e_max() > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "scorer e_max must be positive");
  }
  if (!classifier_.thread_safe()) threads_ = 1;
  original_error_ = scorer_.reconstruction_error(x_);
}

TimeSeriesInstance ObjectiveEvaluator::counterfactual(const ChangeMask& mask) const {
  return apply_mask(x_, mask, nun_);
}

ObjectiveVector ObjectiveEvaluator::evaluate(const ChangeMask& mask) const {
  return evaluate(std::span<const ChangeMask>(&mask, 1)).front();
}

void ObjectiveEvaluator::evaluate_range(std::span<const ChangeMask> masks,
                                        std::span<ObjectiveVector> out) const {
  std::vector<TimeSeriesInstance> cfs;
  cfs.reserve(masks.size());
  for (const auto& m : masks) cfs.push_back(counterfactual(m));
  const auto proba = classifier_.predict_proba(std::span<const TimeSeriesInstance>(cfs));
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const bool valid = argmax(proba[i]) == y_nun_;
    const double ios =
        std::max(0.0, scorer_.reconstruction_error(cfs[i]) - original_error_);
    out[i] = assemble(proba[i][static_cast<std::size_t>(y_nun_)], valid, masks[i],
                      x_.channels(), ios, scorer_.e_max(), cfg_);
  }
}

std::vector<ObjectiveVector> ObjectiveEvaluator::evaluate(std::span<const ChangeMask> masks) const {
  std::vector<ObjectiveVector> out(masks.size());
  const std::size_t workers = std::min(threads_, masks.size());
  if (workers <= 1) {
    evaluate_range(masks, out);
    return out;
  }
  const std::size_t chunk = (masks.size() + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(masks.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, w, begin, end] {
        try {
          evaluate_range(masks.subspan(begin, end - begin),
                         std::span<ObjectiveVector>(out).subspan(begin, end - begin));
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

bool dominates(std::span<const double> a, std::span<const double> b) {
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strict = true;
  }
  return strict;
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  const auto va = a.values();
  const auto vb = b.values();
  return dominates(std::span<const double>(va), std::span<const double>(vb));
}

}  // namespace tscf
