#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "tscf/error.hpp"
#include "tscf/neighbors.hpp"

using namespace tscf;
using tscf::testing::random_instance;

namespace {

LabeledDataset random_dataset(std::mt19937_64& gen, std::size_t n, std::size_t L, std::size_t C,
                              int classes) {
  std::vector<TimeSeriesInstance> xs;
  for (std::size_t i = 0; i < n; ++i) {
    auto x = random_instance(gen, L, C, static_cast<ClassId>(i % classes));
    // Shift by class so the centroid classifier has something to find.
    std::vector<double> v(x.flat().begin(), x.flat().end());
    for (double& d : v) d += 0.8 * static_cast<double>(i % classes);
    xs.emplace_back(L, C, std::move(v), static_cast<ClassId>(i % classes));
  }
  return {std::move(xs), static_cast<std::size_t>(classes)};
}

double brute_distance(const TimeSeriesInstance& a, const TimeSeriesInstance& b) {
  double s = 0.0;
  for (std::size_t t = 0; t < a.length(); ++t) {
    for (std::size_t c = 0; c < a.channels(); ++c) s += std::pow(a.at(t, c) - b.at(t, c), 2);
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("single unlike candidate is returned") {
  const LabeledDataset train({TimeSeriesInstance(2, 1, {0, 0}, 0), TimeSeriesInstance(2, 1, {5, 5}, 1)},
                             2);
  const auto clf = fit_nearest_centroid(train);
  const TimeSeriesInstance x(2, 1, {0.1, 0});
  const auto r = find_nun(train, x, 0, clf);
  CHECK(r.index == 1);
  CHECK(r.target_class == 1);
  CHECK(r.neighbor.flat()[0] == 5.0);
}

TEST_CASE("equidistant candidates resolve to the lower index") {
  std::vector<TimeSeriesInstance> xs;
  for (int i = 0; i < 9; ++i) xs.emplace_back(1, 1, std::vector<double>{i == 3 || i == 7 ? 2.0 : -10.0},
                                              i == 3 || i == 7 ? 1 : 0);
  const LabeledDataset train(std::move(xs), 2);
  const std::vector<ClassId> classes{0, 0, 0, 1, 0, 0, 0, 1, 0};
  CHECK(find_nun(train, classes, TimeSeriesInstance(1, 1, {0.0}), 0).index == 3);
}

TEST_CASE("matches an exhaustive scan over predicted classes") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto train = random_dataset(gen, 50, 6, 2, 2);
    const auto clf = fit_nearest_centroid(train);
    const auto x = random_instance(gen, 6, 2);
    const ClassId predicted = clf.predict(x);
    const auto r = find_nun(train, x, predicted, clf);

    double best = INFINITY;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (clf.predict(train[i]) == predicted) continue;
      const double d = brute_distance(x, train[i]);
      if (d < best) best = d, best_i = i;
    }
    CHECK(r.index == best_i);
    CHECK(std::abs(r.distance - best) <= 1e-12);
    CHECK(std::abs(r.distance - euclidean_distance(x, r.neighbor)) <= 1e-12);
    CHECK(clf.predict(r.neighbor) == r.target_class);
  }
}

TEST_CASE("returned distance is invariant under dataset shuffles") {
  std::mt19937_64 gen(32);
  const auto train = random_dataset(gen, 40, 5, 1, 3);
  const auto clf = fit_nearest_centroid(train);
  const auto x = random_instance(gen, 5, 1);
  const ClassId predicted = clf.predict(x);
  const double expected = find_nun(train, x, predicted, clf).distance;
  for (int k = 0; k < 20; ++k) {
    auto xs = train.instances();
    std::shuffle(xs.begin(), xs.end(), gen);
    const LabeledDataset shuffled(std::move(xs), 3);
    CHECK(find_nun(shuffled, x, predicted, clf).distance == expected);
  }
}

TEST_CASE("target class and label filtering") {
  std::mt19937_64 gen(33);
  const auto train = random_dataset(gen, 30, 4, 1, 3);
  const auto clf = fit_nearest_centroid(train);
  const auto x = random_instance(gen, 4, 1);
  const ClassId predicted = clf.predict(x);
  const ClassId other = (predicted + 1) % 3;

  const auto r = find_nun(train, x, predicted, clf, {other, false});
  CHECK(r.target_class == other);
  CHECK(clf.predict(r.neighbor) == other);

  const auto by_label = find_nun(train, x, predicted, clf, {std::nullopt, true});
  CHECK(by_label.target_class == train.label(by_label.index));
  CHECK(by_label.target_class != predicted);

  auto code = [&](NunOptions opts) {
    try {
      find_nun(train, x, predicted, clf, opts);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code({predicted, false}) == ErrorCode::InvalidArgument);
  CHECK(code({7, false}) == ErrorCode::InvalidArgument);

  const std::vector<ClassId> all_same(train.size(), predicted);
  CHECK_THROWS_AS(find_nun(train, all_same, x, predicted), Error);
}
