#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tscf/core.hpp"
#include "tscf/objectives.hpp"
#include "tscf/rng.hpp"

namespace tscf {

struct Individual {
  ChangeMask mask;
  std::optional<ObjectiveVector> objectives;
  std::optional<std::size_t> rank;
  std::optional<double> crowding;

  friend bool operator==(const Individual&, const Individual&) = default;
};

struct Population {
  std::vector<Individual> individuals;
  std::size_t generation = 0;

  std::size_t size() const noexcept { return individuals.size(); }
  bool any_valid() const;
  friend bool operator==(const Population&, const Population&) = default;
};

struct MutationRates {
  double p_ext = 0.0;
  double p_comp = 0.0;
  double p_prune = 0.0;

  void validate() const;
};

/// Random masks with exactly round(h% of positions) active cells each, chosen
/// as the top-scoring positions under one uniform score per position.
/// Individuals are neither evaluated nor ranked.
Population init_population(std::size_t n, std::size_t length, std::size_t channels, MaskKind kind,
                           double h_percent, RngStream& rng);

// Subsequence mutations. Runs are visited in (channel, start) order.

/// Grows each run by one cell on either side with probability p_ext per side
/// (left draw first). Draws are only taken for in-range boundary cells.
ChangeMask mutate_extend(const ChangeMask& mask, double p_ext, RngStream& rng);
/// Clears each run's first and last cell with probability p_comp per end; a
/// length-1 run takes a single draw.
ChangeMask mutate_compress(const ChangeMask& mask, double p_comp, RngStream& rng);
/// Clears whole runs with probability p_prune, one draw per run.
ChangeMask mutate_prune(const ChangeMask& mask, double p_prune, RngStream& rng);

/// Single-point crossover over the channel-major flattening with the cut
/// drawn from [1, positions - 1].
std::pair<ChangeMask, ChangeMask> single_point_crossover(const ChangeMask& a, const ChangeMask& b,
                                                         RngStream& rng);
std::pair<ChangeMask, ChangeMask> single_point_crossover_at(const ChangeMask& a,
                                                            const ChangeMask& b, std::size_t cut);

using Front = std::vector<std::size_t>;

/// Deb's fast non-dominated sort for maximisation. Indices inside each front
/// are ascending.
std::vector<Front> fast_nondominated_sort(std::span<const std::vector<double>> objectives);

/// Crowding distance per member of one front (same order as the input).
std::vector<double> crowding_distance(std::span<const std::vector<double>> front);

/// Lower rank wins, then larger crowding, then the first contestant.
bool crowded_less(const Individual& a, const Individual& b);

/// N binary tournaments between two distinct, uniformly drawn individuals.
/// Returns indices into the population. Throws MissingRanks.
std::vector<std::size_t> tournament_select(const Population& pop, RngStream& rng);

/// Assigns rank and crowding from a non-dominated sort of evaluated
/// individuals.
void rank_population(std::vector<Individual>& individuals);

struct GenerationResult {
  Population population;
  bool any_valid = false;
};

/// One NSGA-II generation: tournament selection, crossover of consecutive
/// parent pairs, extend/compress/prune mutation of every child, evaluation,
/// elitist merge with the parents, and crowded truncation back to N.
GenerationResult optimize_generation(const Population& pop, const ObjectiveEvaluator& evaluator,
                                     const MutationRates& rates, RngStream& rng);

/// Evaluates (where missing) and ranks a fresh population.
void evaluate_population(Population& pop, const ObjectiveEvaluator& evaluator);

}  // namespace tscf
