#include "tscf/driver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace tscf {

void RunConfig::validate() const {
  if (population_size < 2 || population_size % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "population size must be even and at least 2");
  }
  if (!(init_percent > 0.0 && init_percent <= 100.0)) {
    throw Error(ErrorCode::InvalidArgument, "init percent must lie in (0, 100]");
  }
  if (!(init_increment >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "init increment must be non-negative");
  }
  if (reinit_generations == 0) {
    throw Error(ErrorCode::InvalidArgument, "re-initialisation limit must be at least 1");
  }
  common_rates.validate();
  independent_rates.validate();
  objective_config().validate();
}

void UtilityWeights::validate() const {
  const double w[] = {adversarial, sparsity, subsequences, plausibility};
  double total = 0.0;
  for (double v : w) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidArgument, "utility weights must be >= 0");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "utility weights must sum to 1");
  }
}

double UtilityWeights::utility(const ObjectiveVector& v) const {
  return adversarial * v.o1 + sparsity * v.o2 + subsequences * v.o3 + plausibility * v.o4;
}

std::size_t select_by_utility(std::span<const ObjectiveVector> members, const UtilityWeights& w) {
  if (members.empty()) throw Error(ErrorCode::EmptyFront, "no members to select from");
  std::size_t best = 0;
  double best_u = w.utility(members[0]);
  for (std::size_t i = 1; i < members.size(); ++i) {
    const double u = w.utility(members[i]);
    if (u > best_u) {
      best = i;
      best_u = u;
    }
  }
  return best;
}

const FrontMember& select_by_utility(const ParetoFront& front, const UtilityWeights& w) {
  std::vector<ObjectiveVector> objectives;
  objectives.reserve(front.members.size());
  for (const auto& m : front.members) objectives.push_back(m.objectives);
  return front.members[select_by_utility(objectives, w)];
}

namespace {

/// Utility-best valid rank-0 member: (popcount, utility).
std::optional<std::pair<std::size_t, double>> best_valid(const Population& pop,
                                                         std::size_t channels) {
  std::vector<ObjectiveVector> objectives;
  std::vector<std::size_t> counts;
  for (const auto& ind : pop.individuals) {
    if (*ind.rank == 0 && ind.objectives->valid) {
      objectives.push_back(*ind.objectives);
      counts.push_back(to_independent(ind.mask, channels).popcount());
    }
  }
  if (objectives.empty()) return std::nullopt;
  const std::size_t best = select_by_utility(objectives, UtilityWeights{});
  return std::pair{counts[best], UtilityWeights{}.utility(objectives[best])};
}

void emit(const TraceSink& log, const std::string& line) {
  if (log) log(line);
}

std::string percent(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

RunResult run_multispace(const TimeSeriesInstance& x, const NunResult& nun, ClassId original_class,
                         const ClassifierModel& classifier, const OutlierScorer& scorer,
                         const RunConfig& cfg, const TraceSink& log) {
  cfg.validate();
  const std::size_t length = x.length();
  const std::size_t channels = x.channels();
  RngStream rng(cfg.seed);
  const ObjectiveEvaluator evaluator(x, nun.neighbor, nun.target_class, classifier, scorer,
                                     cfg.objective_config(), cfg.eval_threads);

  RunResult result;
  auto& trace = result.trace;
  double h = cfg.init_percent;

  auto initialise = [&] {
    Population pop =
        init_population(cfg.population_size, length, channels, cfg.first_phase_kind, h, rng);
    evaluate_population(pop, evaluator);
    trace.init_percents.push_back(h);
    emit(log, "init h=" + percent(h) + "% valid=" + (pop.any_valid() ? "1" : "0"));
    return pop;
  };

  Population pop = initialise();
  std::size_t g = 0;
  while (g < cfg.common_generations) {
    auto step = optimize_generation(pop, evaluator, cfg.common_rates, rng);
    pop = std::move(step.population);
    ++trace.common_generations_run;
    ++g;
    if (!step.any_valid && g == cfg.reinit_generations && h < 100.0) {
      const double previous = h;
      h = std::min(100.0, h + cfg.init_increment);
      trace.reinits.push_back({g, previous, h});
      emit(log, "reinit after " + std::to_string(g) + " generations without a valid solution: h " +
                    percent(previous) + "% -> " + percent(h) + "%");
      g = 0;
      pop = initialise();
    }
  }
  if (const auto best = best_valid(pop, channels)) {
    trace.phase1_best_popcount = best->first;
    trace.phase1_best_utility = best->second;
  }

  for (auto& ind : pop.individuals) ind.mask = to_independent(ind.mask, channels);

  for (std::size_t k = 0; k < cfg.independent_generations; ++k) {
    pop = optimize_generation(pop, evaluator, cfg.independent_rates, rng).population;
    ++trace.independent_generations_run;
  }

  auto& front = result.front;
  front.original_class = original_class;
  front.target_class = nun.target_class;
  front.nun_index = nun.index;
  front.nun = nun.neighbor;
  front.nun.set_label(std::nullopt);
  std::unordered_set<std::vector<bool>> seen;
  for (const auto& ind : pop.individuals) {
    if (*ind.rank != 0 || !ind.objectives->valid) continue;
    if (!seen.insert(ind.mask.bits()).second) continue;
    front.members.push_back({ind.mask, evaluator.counterfactual(ind.mask), *ind.objectives});
  }
  emit(log, "done: " + std::to_string(front.members.size()) + " front members");
  if (front.members.empty()) {
    throw Error(ErrorCode::NoValidSolution, "no valid counterfactual in the final population");
  }
  return result;
}

RunResult run_multispace(const TimeSeriesInstance& x, const LabeledDataset& train,
                         const ClassifierModel& classifier, const OutlierScorer& scorer,
                         const RunConfig& cfg, const TraceSink& log) {
  const ClassId original = classifier.predict(x);
  const NunResult nun = find_nun(train, x, original, classifier, cfg.nun);
  return run_multispace(x, nun, original, classifier, scorer, cfg, log);
}

}  // namespace tscf
