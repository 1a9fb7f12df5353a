#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tscf::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kNoUnlikeNeighbor = 3,
  kNoValidSolution = 4,
};

struct FitArgs {
  std::string train;
  std::string model = "centroid";  // centroid | knn | none
  std::string out;
  std::string scorer_out;
  double temperature = 1.0;
  std::size_t k = 5;
  std::optional<std::size_t> components;
};

struct ModelArgs {
  std::string classifier;
  std::string bridge;
  std::string scorer;
  long bridge_timeout_ms = 30'000;
};

struct ExplainArgs {
  std::string test;
  std::string train;
  ModelArgs models;
  std::string config;
  std::string instances = "all";
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  bool keep_going = false;
  std::optional<int> nun_target_class;
  bool nun_by_label = false;
  bool timings = false;
  bool verbose = false;
};

struct SelectArgs {
  std::string front;
  std::string config;
  std::vector<double> weights;
  std::string out;
};

struct EvaluateArgs {
  std::string dir;
  std::string train;
  ModelArgs models;
  std::string out;
  std::string csv;
  bool baseline = false;
};

struct GenSynthArgs {
  std::string kind = "sine-square";
  std::size_t length = 64;
  std::size_t channels = 1;
  std::size_t train_count = 60;
  std::size_t test_count = 30;
  std::uint64_t seed = 0;
  double noise = -1.0;
  std::string out_train;
  std::string out_test;
};

int cmd_fit(const FitArgs& args);
int cmd_explain(const ExplainArgs& args);
int cmd_select(const SelectArgs& args);
int cmd_evaluate(const EvaluateArgs& args);
int cmd_gen_synth(const GenSynthArgs& args);

/// "all", "a..b" (inclusive) or a comma-separated list.
std::vector<std::size_t> parse_instance_selector(const std::string& text, std::size_t count);

}  // namespace tscf::cli
