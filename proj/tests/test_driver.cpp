#include <doctest.h>

#include <set>

#include "support.hpp"
#include "tscf/driver.hpp"
#include "tscf/error.hpp"
#include "tscf/synth.hpp"

using namespace tscf;
using tscf::testing::FunctionClassifier;

namespace {

RunConfig small_config(std::uint64_t seed) {
  RunConfig cfg;
  cfg.population_size = 30;
  cfg.common_generations = 20;
  cfg.independent_generations = 10;
  cfg.reinit_generations = 10;
  cfg.seed = seed;
  return cfg;
}

struct Synthetic {
  LabeledDataset train, test;
  NearestCentroidClassifier clf;
  LinearReconstructionScorer scorer;
};

Synthetic make_synthetic(SynthKind kind, std::size_t channels) {
  SynthSpec spec;
  spec.kind = kind;
  spec.channels = channels;
  spec.length = 32;
  spec.count = 30;
  spec.seed = 3;
  auto train = generate_synthetic(spec);
  spec.seed = 4;
  spec.count = 6;
  auto test = generate_synthetic(spec);
  auto clf = fit_nearest_centroid(train);
  auto scorer = fit_linear_scorer(train, default_component_count(32, channels));
  return {std::move(train), std::move(test), std::move(clf), std::move(scorer)};
}

NunResult donor(TimeSeriesInstance nun, ClassId target) {
  return {std::move(nun), target, 0.0, 0};
}

}  // namespace

TEST_CASE("fronts are valid, non-dominated and de-duplicated") {
  for (auto kind : {SynthKind::SineSquare, SynthKind::Cbf}) {
    const auto s = make_synthetic(kind, 2);
    for (std::size_t i = 0; i < s.test.size(); ++i) {
      const auto r = run_multispace(s.test[i], s.train, s.clf, s.scorer, small_config(i));
      const auto& members = r.front.members;
      REQUIRE_FALSE(members.empty());
      std::set<std::vector<bool>> masks;
      for (const auto& m : members) {
        CHECK(m.objectives.valid);
        CHECK(s.clf.predict(m.counterfactual) == r.front.target_class);
        CHECK(m.mask.kind() == MaskKind::Independent);
        CHECK(apply_mask(s.test[i], m.mask, r.front.nun) == m.counterfactual);
        masks.insert(m.mask.bits());
        for (const auto& other : members) CHECK_FALSE(dominates(other.objectives, m.objectives));
      }
      CHECK(masks.size() == members.size());
      CHECK(r.front.original_class == s.clf.predict(s.test[i]));
      CHECK(r.front.target_class != r.front.original_class);
    }
  }
}

TEST_CASE("a one-cell difference is found") {
  const std::size_t L = 12, C = 2;
  const auto x = TimeSeriesInstance::zeros(L, C);
  auto nun = x;
  nun.at(5, 1) = 1.0;
  const FunctionClassifier clf(2, L, C, [](const TimeSeriesInstance& v) {
    return v.at(5, 1) > 0.5 ? ProbabilityVector{0.2, 0.8} : ProbabilityVector{0.9, 0.1};
  });
  const auto scorer = testing::zero_scorer();

  // Exhaustive check over single-cell masks: exactly one is valid.
  std::size_t valid_single = 0;
  for (std::size_t i = 0; i < L * C; ++i) {
    ChangeMask m = ChangeMask::independent(L, C);
    m.set_flat(i, true);
    valid_single += clf.predict(apply_mask(x, m, nun)) == 1;
  }
  REQUIRE(valid_single == 1);

  const auto r = run_multispace(x, donor(nun, 1), 0, clf, scorer, small_config(7));
  bool found = false;
  for (const auto& m : r.front.members) found = found || m.mask.popcount() == 1;
  CHECK(found);
}

TEST_CASE("degenerate schedule returns the neighbour") {
  const auto s = make_synthetic(SynthKind::Cbf, 3);
  RunConfig cfg = small_config(1);
  cfg.common_generations = 0;
  cfg.independent_generations = 0;
  cfg.init_percent = 100;
  const auto r = run_multispace(s.test[0], s.train, s.clf, s.scorer, cfg);
  REQUIRE(r.front.members.size() == 1);
  const auto& m = r.front.members[0];
  CHECK(m.mask == ChangeMask::ones(MaskKind::Independent, 32, 3));
  CHECK(m.counterfactual == r.front.nun);
  CHECK(count_subsequences(m.mask) == 3);
}

TEST_CASE("same seed gives the same front") {
  const auto s = make_synthetic(SynthKind::SineSquare, 1);
  auto cfg = small_config(99);
  const auto a = run_multispace(s.test[1], s.train, s.clf, s.scorer, cfg);
  const auto b = run_multispace(s.test[1], s.train, s.clf, s.scorer, cfg);
  cfg.eval_threads = 3;
  const auto c = run_multispace(s.test[1], s.train, s.clf, s.scorer, cfg);
  auto masks = [](const RunResult& r) {
    std::vector<std::vector<bool>> out;
    for (const auto& m : r.front.members) out.push_back(m.mask.bits());
    return out;
  };
  CHECK(masks(a) == masks(b));
  CHECK(masks(a) == masks(c));
}

TEST_CASE("pruning phase never grows the selected mask" * doctest::may_fail()) {
  for (auto kind : {SynthKind::SineSquare, SynthKind::Cbf}) {
    const auto s = make_synthetic(kind, 3);
    for (std::size_t i = 0; i < s.test.size(); ++i) {
      const auto r = run_multispace(s.test[i], s.train, s.clf, s.scorer, small_config(40 + i));
      REQUIRE(r.trace.phase1_best_popcount.has_value());
      const auto& best = select_by_utility(r.front, UtilityWeights{});
      CHECK(best.mask.popcount() <= *r.trace.phase1_best_popcount);
    }
  }
}

TEST_CASE("initial density escalates until solutions appear") {
  const std::size_t L = 100;
  const auto x = TimeSeriesInstance::zeros(L, 1);
  const TimeSeriesInstance nun(L, 1, std::vector<double>(L, 1.0));
  const auto clf = testing::escalation_classifier(L, 1);
  const auto scorer = testing::zero_scorer();
  RunConfig cfg = small_config(5);
  std::vector<std::string> log;
  const auto r = run_multispace(x, donor(nun, 1), 0, clf, scorer, cfg,
                                [&](const std::string& line) { log.push_back(line); });
  REQUIRE(r.trace.reinits.size() == 1);
  CHECK(r.trace.reinits[0].old_percent == 20.0);
  CHECK(r.trace.reinits[0].new_percent == 40.0);
  CHECK(r.trace.reinits[0].after_generations == cfg.reinit_generations);
  CHECK(r.trace.init_percents == std::vector<double>{20.0, 40.0});
  CHECK(r.trace.common_generations_run == cfg.reinit_generations + cfg.common_generations);
  CHECK(log.front().find("h=20%") != std::string::npos);
  for (const auto& m : r.front.members) CHECK(m.objectives.valid);
}

TEST_CASE("unreachable target ends with NoValidSolution after capped escalation") {
  const std::size_t L = 6;
  const auto x = TimeSeriesInstance::zeros(L, 1);
  const TimeSeriesInstance nun(L, 1, std::vector<double>(L, 1.0));
  const FunctionClassifier stubborn(2, L, 1, [](const TimeSeriesInstance&) {
    return ProbabilityVector{1.0, 0.0};
  });
  const auto scorer = testing::zero_scorer();
  RunConfig cfg = small_config(6);
  cfg.init_increment = 30;
  try {
    run_multispace(x, donor(nun, 1), 0, stubborn, scorer, cfg);
    FAIL("expected NoValidSolution");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoValidSolution);
  }
  std::vector<double> seen;
  try {
    run_multispace(x, donor(nun, 1), 0, stubborn, scorer, cfg, [&](const std::string& line) {
      if (line.starts_with("init h=")) seen.push_back(std::stod(line.substr(7)));
    });
  } catch (const Error&) {
  }
  CHECK(seen == std::vector<double>{20, 50, 80, 100});
}

TEST_CASE("utility selection") {
  const std::vector<ObjectiveVector> one{{0.9, -0.2, -0.3, 0.0, true}};
  CHECK(select_by_utility(one, UtilityWeights{}) == 0);

  const ObjectiveVector a{0.7, -0.1, -0.2, -0.05, true};
  const ObjectiveVector b{0.7, -0.3, -0.1, -0.05, true};
  const UtilityWeights w;
  CHECK(w.utility(a) - w.utility(b) == doctest::Approx(0.3 * 0.2 + 0.4 * (-0.1)));
  CHECK(select_by_utility(std::vector{b, a}, w) == 1);

  const std::vector<ObjectiveVector> three{{0.6, -0.2, -0.5, -0.1, true},
                                           {0.8, -0.4, -0.3, 0.0, true},
                                           {0.9, -0.1, -0.6, -0.3, true}};
  const double hand[] = {0.1 * 0.6 + 0.3 * -0.2 + 0.4 * -0.5 + 0.2 * -0.1,
                         0.1 * 0.8 + 0.3 * -0.4 + 0.4 * -0.3 + 0.2 * 0.0,
                         0.1 * 0.9 + 0.3 * -0.1 + 0.4 * -0.6 + 0.2 * -0.3};
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(w.utility(three[i]) - hand[i]) <= 1e-12);
  const std::size_t best = select_by_utility(three, w);
  CHECK(best == 1);
  auto scaled = three;
  for (auto& v : scaled) v = {v.o1 * 3.5, v.o2 * 3.5, v.o3 * 3.5, v.o4 * 3.5, true};
  CHECK(select_by_utility(scaled, w) == best);

  CHECK_THROWS_AS(select_by_utility(std::vector<ObjectiveVector>{}, w), Error);
  CHECK_THROWS_AS((UtilityWeights{0.1, 0.3, 0.4, 0.1}.validate()), Error);
}

TEST_CASE("run configuration checks") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.population_size = 7;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.init_percent = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.common_rates.p_ext = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
