#include "tscf/genetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tscf {

bool Population::any_valid() const {
  return std::any_of(individuals.begin(), individuals.end(),
                     [](const Individual& ind) { return ind.objectives && ind.objectives->valid; });
}

void MutationRates::validate() const {
  for (double p : {p_ext, p_comp, p_prune}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "mutation probabilities must lie in [0, 1]");
    }
  }
}

Population init_population(std::size_t n, std::size_t length, std::size_t channels, MaskKind kind,
                           double h_percent, RngStream& rng) {
  if (!(h_percent > 0.0 && h_percent <= 100.0)) {
    throw Error(ErrorCode::InvalidArgument, "initial activation percentage must lie in (0, 100]");
  }
  const ChangeMask blank(kind, length, channels);
  const std::size_t positions = blank.positions();
  const auto active = std::min<std::size_t>(
      positions,
      static_cast<std::size_t>(std::llround(h_percent / 100.0 * static_cast<double>(positions))));

  Population pop;
  pop.individuals.reserve(n);
  std::vector<double> score(positions);
  std::vector<std::size_t> order(positions);
  for (std::size_t k = 0; k < n; ++k) {
    for (double& s : score) s = rng.uniform01();
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    ChangeMask mask = blank;
    for (std::size_t i = 0; i < active; ++i) mask.set_flat(order[i], true);
    pop.individuals.push_back({std::move(mask), std::nullopt, std::nullopt, std::nullopt});
  }
  return pop;
}

ChangeMask mutate_extend(const ChangeMask& mask, double p_ext, RngStream& rng) {
  ChangeMask out = mask;
  const std::size_t length = mask.length();
  for (const auto& run : decompose_mask(mask)) {
    // Boundary cells of a maximal run are 0 in the source mask.
    if (run.start > 0 && rng.bernoulli(p_ext)) out.set(run.start - 1, run.channel, true);
    if (run.end() < length && rng.bernoulli(p_ext)) out.set(run.end(), run.channel, true);
  }
  return out;
}

ChangeMask mutate_compress(const ChangeMask& mask, double p_comp, RngStream& rng) {
  ChangeMask out = mask;
  for (const auto& run : decompose_mask(mask)) {
    if (run.length == 1) {
      if (rng.bernoulli(p_comp)) out.set(run.start, run.channel, false);
      continue;
    }
    if (rng.bernoulli(p_comp)) out.set(run.start, run.channel, false);
    if (rng.bernoulli(p_comp)) out.set(run.end() - 1, run.channel, false);
  }
  return out;
}

ChangeMask mutate_prune(const ChangeMask& mask, double p_prune, RngStream& rng) {
  ChangeMask out = mask;
  for (const auto& run : decompose_mask(mask)) {
    if (!rng.bernoulli(p_prune)) continue;
    for (std::size_t t = run.start; t < run.end(); ++t) out.set(t, run.channel, false);
  }
  return out;
}

std::pair<ChangeMask, ChangeMask> single_point_crossover_at(const ChangeMask& a,
                                                            const ChangeMask& b, std::size_t cut) {
  if (a.kind() != b.kind() || a.length() != b.length() || a.channels() != b.channels()) {
    throw Error(ErrorCode::DimensionMismatch, "crossover parents differ in kind or shape");
  }
  if (cut > a.positions()) {
    throw Error(ErrorCode::OutOfBounds, "crossover cut beyond mask size");
  }
  ChangeMask first = a;
  ChangeMask second = b;
  for (std::size_t i = cut; i < a.positions(); ++i) {
    first.set_flat(i, b.flat(i));
    second.set_flat(i, a.flat(i));
  }
  return {std::move(first), std::move(second)};
}

std::pair<ChangeMask, ChangeMask> single_point_crossover(const ChangeMask& a, const ChangeMask& b,
                                                         RngStream& rng) {
  if (a.kind() != b.kind() || a.length() != b.length() || a.channels() != b.channels()) {
    throw Error(ErrorCode::DimensionMismatch, "crossover parents differ in kind or shape");
  }
  if (a.positions() < 2) return {a, b};
  const std::size_t cut = 1 + rng.uniform_index(a.positions() - 1);
  return single_point_crossover_at(a, b, cut);
}

std::vector<Front> fast_nondominated_sort(std::span<const std::vector<double>> objectives) {
  const std::size_t n = objectives.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> domination_count(n, 0);
  std::vector<Front> fronts;
  Front current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(objectives[p], objectives[q])) {
        dominated[p].push_back(q);
      } else if (dominates(objectives[q], objectives[p])) {
        ++domination_count[p];
      }
    }
    if (domination_count[p] == 0) current.push_back(p);
  }
  while (!current.empty()) {
    Front next;
    for (std::size_t p : current) {
      for (std::size_t q : dominated[p]) {
        if (--domination_count[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(std::span<const std::vector<double>> front) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t n = front.size();
  if (n <= 2) return std::vector<double>(n, inf);
  std::vector<double> distance(n, 0.0);
  std::vector<std::size_t> order(n);
  const std::size_t m_count = front.front().size();
  for (std::size_t m = 0; m < m_count; ++m) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return front[a][m] < front[b][m]; });
    distance[order.front()] = inf;
    distance[order.back()] = inf;
    const double range = front[order.back()][m] - front[order.front()][m];
    if (range <= 0.0) continue;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      distance[order[i]] += (front[order[i + 1]][m] - front[order[i - 1]][m]) / range;
    }
  }
  return distance;
}

bool crowded_less(const Individual& a, const Individual& b) {
  if (*a.rank != *b.rank) return *a.rank < *b.rank;
  return *a.crowding > *b.crowding;
}

std::vector<std::size_t> tournament_select(const Population& pop, RngStream& rng) {
  const std::size_t n = pop.size();
  for (const auto& ind : pop.individuals) {
    if (!ind.rank || !ind.crowding) {
      throw Error(ErrorCode::MissingRanks, "tournament needs ranked and crowded individuals");
    }
  }
  if (n < 2) {
    throw Error(ErrorCode::InvalidArgument, "tournament needs at least two individuals");
  }
  std::vector<std::size_t> winners;
  winners.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t first = rng.uniform_index(n);
    std::size_t second = rng.uniform_index(n - 1);
    if (second >= first) ++second;
    const bool second_wins = crowded_less(pop.individuals[second], pop.individuals[first]);
    winners.push_back(second_wins ? second : first);
  }
  return winners;
}

namespace {

std::vector<std::vector<double>> objective_matrix(const std::vector<Individual>& individuals) {
  std::vector<std::vector<double>> out;
  out.reserve(individuals.size());
  for (const auto& ind : individuals) {
    const auto v = ind.objectives->values();
    out.emplace_back(v.begin(), v.end());
  }
  return out;
}

/// Sorts, then writes rank and crowding into every individual.
std::vector<Front> assign_ranks(std::vector<Individual>& individuals) {
  const auto objectives = objective_matrix(individuals);
  auto fronts = fast_nondominated_sort(objectives);
  std::vector<std::vector<double>> members;
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    members.clear();
    for (std::size_t i : fronts[r]) members.push_back(objectives[i]);
    const auto crowd = crowding_distance(members);
    for (std::size_t j = 0; j < fronts[r].size(); ++j) {
      individuals[fronts[r][j]].rank = r;
      individuals[fronts[r][j]].crowding = crowd[j];
    }
  }
  return fronts;
}

}  // namespace

void rank_population(std::vector<Individual>& individuals) {
  for (const auto& ind : individuals) {
    if (!ind.objectives) {
      throw Error(ErrorCode::InvalidArgument, "ranking needs evaluated individuals");
    }
  }
  assign_ranks(individuals);
}

void evaluate_population(Population& pop, const ObjectiveEvaluator& evaluator) {
  std::vector<ChangeMask> pending;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (!pop.individuals[i].objectives) {
      pending.push_back(pop.individuals[i].mask);
      where.push_back(i);
    }
  }
  const auto results = evaluator.evaluate(pending);
  for (std::size_t k = 0; k < where.size(); ++k) pop.individuals[where[k]].objectives = results[k];
  rank_population(pop.individuals);
}

GenerationResult optimize_generation(const Population& pop, const ObjectiveEvaluator& evaluator,
                                     const MutationRates& rates, RngStream& rng) {
  rates.validate();
  const std::size_t n = pop.size();
  const auto parents = tournament_select(pop, rng);

  std::vector<ChangeMask> offspring;
  offspring.reserve(n);
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    auto [a, b] = single_point_crossover(pop.individuals[parents[k]].mask,
                                         pop.individuals[parents[k + 1]].mask, rng);
    offspring.push_back(std::move(a));
    offspring.push_back(std::move(b));
  }
  if (offspring.size() < n) offspring.push_back(pop.individuals[parents.back()].mask);

  // A zero rate makes an operator the identity; it is skipped without draws.
  for (auto& child : offspring) {
    if (rates.p_ext > 0.0) child = mutate_extend(child, rates.p_ext, rng);
    if (rates.p_comp > 0.0) child = mutate_compress(child, rates.p_comp, rng);
    if (rates.p_prune > 0.0) child = mutate_prune(child, rates.p_prune, rng);
  }

  const auto child_objectives = evaluator.evaluate(offspring);

  std::vector<Individual> merged;
  merged.reserve(2 * n);
  for (const auto& ind : pop.individuals) {
    merged.push_back({ind.mask, ind.objectives, std::nullopt, std::nullopt});
  }
  for (std::size_t k = 0; k < offspring.size(); ++k) {
    merged.push_back({std::move(offspring[k]), child_objectives[k], std::nullopt, std::nullopt});
  }
  const auto fronts = assign_ranks(merged);

  GenerationResult result;
  result.population.generation = pop.generation + 1;
  auto& next = result.population.individuals;
  next.reserve(n);
  for (const auto& front : fronts) {
    if (next.size() + front.size() <= n) {
      for (std::size_t i : front) next.push_back(merged[i]);
      if (next.size() == n) break;
      continue;
    }
    Front last = front;
    std::stable_sort(last.begin(), last.end(), [&](std::size_t a, std::size_t b) {
      return *merged[a].crowding > *merged[b].crowding;
    });
    for (std::size_t k = 0; next.size() < n; ++k) next.push_back(merged[last[k]]);
    break;
  }
  result.any_valid = result.population.any_valid();
  return result;
}

}  // namespace tscf
