#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "support.hpp"
#include "tscf/error.hpp"
#include "tscf/json_io.hpp"

using namespace tscf;
using tscf::testing::random_instance;
namespace fs = std::filesystem;

namespace {

LabeledDataset gaussian_dataset(std::mt19937_64& gen, std::size_t n, std::size_t L, std::size_t C,
                                int classes) {
  std::vector<TimeSeriesInstance> xs;
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back(random_instance(gen, L, C, static_cast<ClassId>(i % classes)));
  }
  return {std::move(xs), static_cast<std::size_t>(classes)};
}

// Residual of x after projecting onto the top-d right singular vectors of the
// centred data.
struct SvdOracle {
  Eigen::RowVectorXd mean;
  Eigen::MatrixXd basis;

  SvdOracle(const LabeledDataset& train, std::size_t d) {
    const auto n = static_cast<Eigen::Index>(train.size());
    const auto p = static_cast<Eigen::Index>(train.length() * train.channels());
    Eigen::MatrixXd a(n, p);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index j = 0; j < p; ++j) a(r, j) = train[r].flat()[j];
    }
    mean = a.colwise().mean();
    a.rowwise() -= mean;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
    basis = svd.matrixV().leftCols(static_cast<Eigen::Index>(d));
  }

  double residual(const TimeSeriesInstance& x) const {
    Eigen::RowVectorXd v(mean.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = x.flat()[j] - mean(j);
    const Eigen::RowVectorXd proj = (v * basis) * basis.transpose();
    return (v - proj).norm();
  }
};

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "tscf_model_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("nearest centroid fitting") {
  const LabeledDataset one_each({TimeSeriesInstance(2, 1, {1, 2}, 0), TimeSeriesInstance(2, 1, {3, 4}, 1)}, 2);
  const auto m = fit_nearest_centroid(one_each);
  CHECK(m.centroids()[0] == TimeSeriesInstance(2, 1, {1, 2}));
  CHECK(m.centroids()[1] == TimeSeriesInstance(2, 1, {3, 4}));

  const LabeledDataset tiny({TimeSeriesInstance(1, 1, {0}, 0), TimeSeriesInstance(1, 1, {2}, 0),
                             TimeSeriesInstance(1, 1, {9}, 1)},
                            2);
  CHECK(fit_nearest_centroid(tiny).centroids()[0].flat()[0] == doctest::Approx(1.0));

  std::mt19937_64 gen(41);
  const auto train = gaussian_dataset(gen, 31, 5, 2, 3);
  const auto fitted = fit_nearest_centroid(train);
  for (int k = 0; k < 3; ++k) {
    for (std::size_t j = 0; j < 10; ++j) {
      double sum = 0.0;
      int count = 0;
      for (std::size_t i = 0; i < train.size(); ++i) {
        if (train.label(i) == k) sum += train[i].flat()[j], ++count;
      }
      CHECK(fitted.centroids()[k].flat()[j] == doctest::Approx(sum / count).epsilon(1e-12));
    }
  }

  const LabeledDataset gap({TimeSeriesInstance(1, 1, {0}, 0), TimeSeriesInstance(1, 1, {1}, 2)}, 3);
  try {
    fit_nearest_centroid(gap);
    FAIL("expected EmptyClass");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyClass);
  }
}

TEST_CASE("classifier probabilities") {
  const NearestCentroidClassifier nc({TimeSeriesInstance(2, 1, {0, 0}), TimeSeriesInstance(2, 1, {10, 10}),
                                      TimeSeriesInstance(2, 1, {-10, 10})},
                                     0.1);
  CHECK(nc.predict_proba(TimeSeriesInstance(2, 1, {0, 0}))[0] > 0.99);

  const LabeledDataset train({TimeSeriesInstance(1, 1, {0.0}, 0), TimeSeriesInstance(1, 1, {1.0}, 0),
                              TimeSeriesInstance(1, 1, {2.0}, 1), TimeSeriesInstance(1, 1, {10.0}, 1)},
                             2);
  const auto k1 = fit_knn(train, 1);
  CHECK(k1.predict_proba(train[2]) == ProbabilityVector{0.0, 1.0});
  const auto k3 = fit_knn(train, 3);
  const auto p = k3.predict_proba(TimeSeriesInstance(1, 1, {0.9}));
  CHECK(p[0] == doctest::Approx(2.0 / 3.0));
  CHECK(p[1] == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(fit_knn(train, 0), Error);
  CHECK_THROWS_AS(fit_knn(train, 5), Error);
}

TEST_CASE("probabilities sum to one on 1,000 random inputs") {
  std::mt19937_64 gen(42);
  const auto train = gaussian_dataset(gen, 40, 8, 2, 4);
  const auto nc = fit_nearest_centroid(train, 0.5);
  const auto knn = fit_knn(train, 5);
  for (int i = 0; i < 1000; ++i) {
    auto x = random_instance(gen, 8, 2);
    for (const ClassifierModel* m : {static_cast<const ClassifierModel*>(&nc),
                                     static_cast<const ClassifierModel*>(&knn)}) {
      const auto p = m->predict_proba(x);
      REQUIRE(p.size() == 4);
      REQUIRE(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) <= 1e-6);
      for (double v : p) REQUIRE(v >= 0.0);
    }
  }
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto p = fit_knn(train, 1).predict_proba(train[i]);
    ProbabilityVector onehot(4, 0.0);
    onehot[static_cast<std::size_t>(train.label(i))] = 1.0;
    CHECK(p == onehot);
  }
}

TEST_CASE("linear scorer on exact subspaces") {
  // Points on the line {m + s * u} in R^4.
  std::vector<TimeSeriesInstance> xs;
  for (int i = 0; i < 10; ++i) {
    const double s = i - 4.5;
    xs.emplace_back(4, 1, std::vector<double>{1 + s, 2 - s, 3 + 2 * s, 4}, i % 2);
  }
  const LabeledDataset line(std::move(xs), 2);
  const auto scorer = fit_linear_scorer(line, 1);
  for (double e : training_errors(scorer, line)) CHECK(e < 1e-8);
  CHECK(scorer.e_max() == 1.0);

  const TimeSeriesInstance mean(4, 1, scorer.mean());
  CHECK(scorer.reconstruction_error(mean) == doctest::Approx(0.0).epsilon(1e-12));
  const TimeSeriesInstance on_line(4, 1, {1 + 7.0, 2 - 7.0, 3 + 14.0, 4});
  CHECK(scorer.reconstruction_error(on_line) < 1e-8);

  const LabeledDataset dup({TimeSeriesInstance(2, 1, {1, 1}, 0), TimeSeriesInstance(2, 1, {1, 1}, 1)}, 2);
  try {
    fit_linear_scorer(dup, 1);
    FAIL("expected DegenerateData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateData);
  }
}

TEST_CASE("linear scorer matches an SVD projection oracle") {
  std::mt19937_64 gen(43);
  const auto train = gaussian_dataset(gen, 30, 6, 2, 2);
  for (std::size_t d : {std::size_t{3}, std::size_t{11}}) {
    const auto scorer = fit_linear_scorer(train, d);
    const SvdOracle oracle(train, d);
    for (std::size_t i = 0; i < train.size(); ++i) {
      CHECK(scorer.reconstruction_error(train[i]) ==
            doctest::Approx(oracle.residual(train[i])).epsilon(1e-9));
    }
    for (int k = 0; k < 50; ++k) {
      const auto x = random_instance(gen, 6, 2);
      CHECK(scorer.reconstruction_error(x) == doctest::Approx(oracle.residual(x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("linear scorer ignores training order") {
  std::mt19937_64 gen(44);
  const auto train = gaussian_dataset(gen, 25, 5, 1, 2);
  const auto a = fit_linear_scorer(train, 3);
  auto xs = train.instances();
  std::shuffle(xs.begin(), xs.end(), gen);
  const auto b = fit_linear_scorer(LabeledDataset(std::move(xs), 2), 3);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t j = 0; j < 5; ++j) {
      CHECK(a.components()[k][j] == doctest::Approx(b.components()[k][j]).epsilon(1e-9));
    }
  }
  for (int k = 0; k < 50; ++k) {
    const auto x = random_instance(gen, 5, 1);
    CHECK(a.reconstruction_error(x) == doctest::Approx(b.reconstruction_error(x)).epsilon(1e-9));
  }
}

TEST_CASE("model files round trip") {
  std::mt19937_64 gen(45);
  const auto train = gaussian_dataset(gen, 20, 6, 2, 3);
  const auto nc = fit_nearest_centroid(train, 0.7);
  const auto knn = fit_knn(train, 3);
  const auto scorer = fit_linear_scorer(train, 4);
  save_model(nc, temp_file("nc.json"));
  save_model(knn, temp_file("knn.json"));
  save_model(scorer, temp_file("scorer.json"));

  const auto nc2 = load_classifier(temp_file("nc.json"));
  const auto knn2 = load_classifier(temp_file("knn.json"));
  const auto scorer2 = load_scorer(temp_file("scorer.json"));
  for (int i = 0; i < 100; ++i) {
    const auto x = random_instance(gen, 6, 2);
    REQUIRE(nc2->predict_proba(x) == nc.predict_proba(x));
    REQUIRE(knn2->predict_proba(x) == knn.predict_proba(x));
    REQUIRE(scorer2->reconstruction_error(x) == scorer.reconstruction_error(x));
  }
  CHECK(scorer2->e_max() == scorer.e_max());
  CHECK_THROWS_AS(load_scorer(temp_file("nc.json")), Error);
}

TEST_CASE("broken model files") {
  std::mt19937_64 gen(46);
  const auto train = gaussian_dataset(gen, 10, 3, 1, 2);
  save_model(fit_nearest_centroid(train), temp_file("full.json"));
  std::ifstream in(temp_file("full.json"));
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  write_text_file(temp_file("cut.json"), text.substr(0, text.size() / 2));

  auto code = [](const fs::path& p) {
    try {
      load_model(p);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code(temp_file("cut.json")) == ErrorCode::CorruptFile);

  json doc = read_json_file(temp_file("full.json"));
  doc["model_type"] = "svm";
  write_json_file(temp_file("svm.json"), doc);
  CHECK(code(temp_file("svm.json")) == ErrorCode::UnknownModelType);

  doc["model_type"] = "nearest_centroid";
  doc["format_version"] = 2;
  write_json_file(temp_file("v2.json"), doc);
  CHECK(code(temp_file("v2.json")) == ErrorCode::VersionMismatch);
  CHECK(code(temp_file("missing.json")) == ErrorCode::Io);
}
