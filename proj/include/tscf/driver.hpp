#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tscf/core.hpp"
#include "tscf/genetic.hpp"
#include "tscf/models.hpp"
#include "tscf/neighbors.hpp"
#include "tscf/objectives.hpp"

namespace tscf {

struct RunConfig {
  std::size_t population_size = 100;
  /// Mask kind of the first phase. Independent runs skip the broadcast.
  MaskKind first_phase_kind = MaskKind::Common;
  std::size_t common_generations = 75;       // G1
  std::size_t independent_generations = 25;  // G2
  MutationRates common_rates{0.75, 0.75, 0.0};
  MutationRates independent_rates{0.0, 0.0, 0.75};
  double init_percent = 20.0;       // h
  double init_increment = 20.0;     // h_inc
  std::size_t reinit_generations = 50;
  double gamma = 0.25;
  double nu = 100.0;
  std::uint64_t seed = 0;
  NunOptions nun;
  /// Fitness evaluation threads inside one run.
  std::size_t eval_threads = 1;

  /// Throws InvalidArgument on violated invariants.
  void validate() const;
  ObjectiveConfig objective_config() const { return {gamma, nu}; }
};

struct UtilityWeights {
  double adversarial = 0.1;
  double sparsity = 0.3;
  double subsequences = 0.4;
  double plausibility = 0.2;

  void validate() const;
  double utility(const ObjectiveVector& v) const;
};

struct FrontMember {
  ChangeMask mask;  // Independent
  TimeSeriesInstance counterfactual;
  ObjectiveVector objectives;
};

struct ParetoFront {
  std::vector<FrontMember> members;
  ClassId original_class = 0;
  ClassId target_class = 0;
  std::size_t nun_index = 0;
  TimeSeriesInstance nun;
};

/// What happened during a run, for logging and tests.
struct RunTrace {
  struct Reinit {
    std::size_t after_generations;  // generations since the previous (re)initialisation
    double old_percent;
    double new_percent;
  };
  std::vector<Reinit> reinits;
  std::vector<double> init_percents;  // every initialisation, in order
  std::size_t common_generations_run = 0;
  std::size_t independent_generations_run = 0;
  /// Utility-selected popcount among valid rank-0 members when phase 1 ends.
  std::optional<std::size_t> phase1_best_popcount;
  std::optional<double> phase1_best_utility;
};

using TraceSink = std::function<void(const std::string&)>;

struct RunResult {
  ParetoFront front;
  RunTrace trace;
};

/// Two-phase search: common masks for G1 generations with escalating
/// re-initialisation, then independent masks for G2 prune-only generations.
/// Returns the valid, de-duplicated rank-0 members of the final population.
/// Throws NoUnlikeNeighbor or NoValidSolution.
RunResult run_multispace(const TimeSeriesInstance& x, const LabeledDataset& train,
                         const ClassifierModel& classifier, const OutlierScorer& scorer,
                         const RunConfig& cfg, const TraceSink& log = {});

/// Same, with the neighbour already chosen.
RunResult run_multispace(const TimeSeriesInstance& x, const NunResult& nun, ClassId original_class,
                         const ClassifierModel& classifier, const OutlierScorer& scorer,
                         const RunConfig& cfg, const TraceSink& log = {});

/// Index of the member maximising the weighted objective sum; ties go to the
/// lowest index. Throws EmptyFront.
std::size_t select_by_utility(std::span<const ObjectiveVector> members, const UtilityWeights& w);
const FrontMember& select_by_utility(const ParetoFront& front, const UtilityWeights& w);

}  // namespace tscf
