#include <doctest.h>

#include <array>
#include <cmath>

#include "support.hpp"
#include "tscf/error.hpp"

using namespace tscf;
using tscf::testing::random_instance;
using tscf::testing::random_mask;
using tscf::testing::series;

namespace {

// Independent scan: a run starts wherever a 1 follows a 0 or the channel start.
std::vector<Subsequence> scan_runs(const ChangeMask& m) {
  std::vector<Subsequence> out;
  for (std::size_t c = 0; c < m.channels(); ++c) {
    for (std::size_t t = 0; t < m.length(); ++t) {
      if (!m.get(t, c) || (t > 0 && m.get(t - 1, c))) continue;
      std::size_t e = t;
      while (e < m.length() && m.get(e, c)) ++e;
      out.push_back({t, c, e - t});
    }
  }
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("decompose reads off runs") {
  CHECK(decompose_mask(ChangeMask::from_string("01100111")) ==
        std::vector<Subsequence>{{1, 0, 2}, {5, 0, 3}});
  CHECK(decompose_mask(ChangeMask::independent(4, 2)).empty());
  const std::array<std::string_view, 2> rows{"110011", "000100"};
  const auto m = ChangeMask::from_strings(rows);
  const std::vector<Subsequence> expected{{0, 0, 2}, {4, 0, 2}, {3, 1, 1}};
  CHECK(decompose_mask(m) == expected);
  CHECK(scan_runs(m) == expected);
}

TEST_CASE("reconstruct is the set union of runs") {
  CHECK(reconstruct_mask({}, 4, 1, MaskKind::Common) == ChangeMask::common(4));
  const std::vector<Subsequence> subs{{1, 0, 2}, {5, 0, 3}};
  CHECK(reconstruct_mask(subs, 8, 1, MaskKind::Common) == ChangeMask::from_string("01100111"));
  const std::vector<Subsequence> overlap{{0, 0, 3}, {2, 0, 3}};
  CHECK(reconstruct_mask(overlap, 6, 1, MaskKind::Common).to_string() == "111110");
  const std::vector<Subsequence> bad{{5, 0, 3}};
  CHECK(code_of([&] { reconstruct_mask(bad, 6, 1, MaskKind::Common); }) == ErrorCode::OutOfBounds);
  const std::vector<Subsequence> bad_channel{{0, 2, 1}};
  CHECK(code_of([&] { reconstruct_mask(bad_channel, 6, 2, MaskKind::Independent); }) ==
        ErrorCode::OutOfBounds);
}

TEST_CASE("round trip and maximality on 10,000 random masks") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<std::size_t> len(1, 64), ch(1, 8);
  std::uniform_real_distribution<double> dens(0.0, 1.0);
  for (int i = 0; i < 10'000; ++i) {
    const bool common = i % 2 == 0;
    const std::size_t length = len(gen);
    const std::size_t channels = common ? 1 : ch(gen);
    const auto kind = common ? MaskKind::Common : MaskKind::Independent;
    const auto m = random_mask(gen, kind, length, channels, dens(gen));
    const auto subs = decompose_mask(m);
    REQUIRE(subs == scan_runs(m));
    REQUIRE(reconstruct_mask(subs, length, channels, kind) == m);
    for (std::size_t k = 1; k < subs.size(); ++k) {
      if (subs[k].channel == subs[k - 1].channel) REQUIRE(subs[k - 1].end() < subs[k].start);
    }
    REQUIRE(count_subsequences(m) == subs.size());
  }
}

TEST_CASE("broadcast replicates the common row") {
  const auto b = broadcast_mask(ChangeMask::from_string("0110"), 3);
  CHECK(b.kind() == MaskKind::Independent);
  CHECK(b.to_string() == "0110|0110|0110");
  CHECK(broadcast_mask(ChangeMask::ones(MaskKind::Common, 2, 1), 2) ==
        ChangeMask::ones(MaskKind::Independent, 2, 2));
  const auto single = broadcast_mask(ChangeMask::from_string("10"), 1);
  CHECK(single.channels() == 1);
  CHECK(single.get(0, 0));
  CHECK_FALSE(single.get(1, 0));
  CHECK(code_of([] { broadcast_mask(ChangeMask::independent(3, 2), 2); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("apply_mask substitutes active cells") {
  std::mt19937_64 gen(5);
  const auto x = random_instance(gen, 6, 2);
  const auto nun = random_instance(gen, 6, 2);
  CHECK(apply_mask(x, ChangeMask::independent(6, 2), nun) == x);
  CHECK(apply_mask(x, ChangeMask::ones(MaskKind::Independent, 6, 2), nun) == nun);
  CHECK(apply_mask(x, ChangeMask::ones(MaskKind::Common, 6, 1), nun) == nun);
  CHECK(apply_mask(series({1, 2, 3}), ChangeMask::from_string("010"), series({9, 8, 7})) ==
        series({1, 8, 3}));
  CHECK(code_of([&] { apply_mask(x, ChangeMask::common(5), nun); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("apply_mask is idempotent and changes at most the active cells") {
  std::mt19937_64 gen(6);
  for (int i = 0; i < 500; ++i) {
    const std::size_t L = 1 + gen() % 20, C = 1 + gen() % 4;
    const auto kind = i % 2 ? MaskKind::Common : MaskKind::Independent;
    const auto m = random_mask(gen, kind, L, kind == MaskKind::Common ? 1 : C, 0.4);
    const auto x = random_instance(gen, L, C);
    const auto nun = random_instance(gen, L, C);
    const auto once = apply_mask(x, m, nun);
    REQUIRE(apply_mask(once, m, nun) == once);
    std::size_t differing = 0;
    for (std::size_t k = 0; k < x.size(); ++k) differing += once.flat()[k] != x.flat()[k];
    // Continuous random values differ everywhere, so equality holds.
    REQUIRE(differing == to_independent(m, C).popcount());
  }
}

TEST_CASE("count_subsequences") {
  CHECK(count_subsequences(ChangeMask::from_string("1100110")) == 2);
  CHECK(count_subsequences(ChangeMask::ones(MaskKind::Independent, 5, 3)) == 3);
  CHECK(count_subsequences(ChangeMask::from_string("1010101")) == 4);
  CHECK(count_subsequences(ChangeMask::from_string("1000000")) == 1);
}

TEST_CASE("instances and datasets validate their inputs") {
  CHECK(code_of([] { TimeSeriesInstance(3, 1, {1.0, 2.0}); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([] { TimeSeriesInstance(2, 1, {1.0, std::nan("")}); }) ==
        ErrorCode::InvalidArgument);
  std::vector<TimeSeriesInstance> one_class{TimeSeriesInstance(2, 1, {0, 0}, 0),
                                            TimeSeriesInstance(2, 1, {1, 1}, 0)};
  CHECK_THROWS_AS(LabeledDataset(one_class, 2), Error);
  std::vector<TimeSeriesInstance> bad_label{TimeSeriesInstance(2, 1, {0, 0}, 0),
                                            TimeSeriesInstance(2, 1, {1, 1}, 2)};
  CHECK_THROWS_AS(LabeledDataset(bad_label, 2), Error);
  CHECK(euclidean_distance(series({0, 0}), series({3, 4})) == doctest::Approx(5.0));
}
