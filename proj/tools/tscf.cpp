#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

using namespace tscf::cli;

namespace {

void add_model_flags(CLI::App* app, ModelArgs& m) {
  app->add_option("--classifier", m.classifier, "Classifier model file");
  app->add_option("--bridge", m.bridge, "Shell command serving an external classifier");
  app->add_option("--bridge-timeout-ms", m.bridge_timeout_ms, "Per-request bridge timeout")
      ->check(CLI::PositiveNumber);
  app->add_option("--scorer", m.scorer, "Outlier scorer model file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective counterfactual explanations for time-series classifiers", "tscf"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a classifier and/or outlier scorer");
  fit_cmd->add_option("--train", fit.train, "Training dataset")->required();
  fit_cmd->add_option("--model", fit.model, "centroid, knn or none");
  fit_cmd->add_option("--out", fit.out, "Classifier output file");
  fit_cmd->add_option("--scorer-out", fit.scorer_out, "Scorer output file");
  fit_cmd->add_option("--temperature", fit.temperature, "Nearest-centroid softmax temperature");
  fit_cmd->add_option("-k", fit.k, "Neighbours for knn")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--components", fit.components, "Principal components kept by the scorer");

  ExplainArgs ex;
  auto* ex_cmd = app.add_subcommand("explain", "Compute Pareto fronts of counterfactuals");
  ex_cmd->add_option("--test", ex.test, "Dataset holding the instances to explain")->required();
  ex_cmd->add_option("--train", ex.train, "Training dataset (NUN donors)")->required();
  add_model_flags(ex_cmd, ex.models);
  ex_cmd->add_option("--config", ex.config, "Config file");
  ex_cmd->add_option("--instances", ex.instances, "all, a..b or i,j,k");
  ex_cmd->add_option("--out", ex.out, "Output directory")->required();
  ex_cmd->add_option("--seed", ex.seed, "Base seed; instance i uses seed + i");
  ex_cmd->add_option("--jobs", ex.jobs, "Instances explained in parallel")
      ->check(CLI::PositiveNumber);
  ex_cmd->add_flag("--keep-going", ex.keep_going, "Record per-instance failures and continue");
  ex_cmd->add_option("--nun-target-class", ex.nun_target_class, "Force the counterfactual class");
  ex_cmd->add_flag("--nun-by-label", ex.nun_by_label, "Pick donors by ground-truth label");
  ex_cmd->add_flag("--timings", ex.timings, "Write timings.json next to the fronts");
  ex_cmd->add_flag("-v,--verbose", ex.verbose, "Log optimisation progress to stderr");

  SelectArgs sel;
  auto* sel_cmd = app.add_subcommand("select", "Pick the utility-maximising front member");
  sel_cmd->add_option("--front", sel.front, "Front file")->required();
  sel_cmd->add_option("--config", sel.config, "Config file supplying weights");
  sel_cmd->add_option("--weights", sel.weights, "adversarial sparsity subsequences plausibility")
      ->expected(4);
  sel_cmd->add_option("--out", sel.out, "Output file (stdout if omitted)");

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Compute metrics over a directory of fronts");
  ev_cmd->add_option("--dir", ev.dir, "Directory written by explain")->required();
  ev_cmd->add_option("--train", ev.train, "Training dataset")->required();
  add_model_flags(ev_cmd, ev.models);
  ev_cmd->add_option("--out", ev.out, "Report file (stdout if omitted)");
  ev_cmd->add_option("--csv", ev.csv, "Per-instance CSV");
  ev_cmd->add_flag("--baseline", ev.baseline, "Add the full-swap baseline");

  GenSynthArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synth", "Generate a synthetic dataset");
  gen_cmd->group("");
  gen_cmd->add_option("--kind", gen.kind, "sine-square or cbf");
  gen_cmd->add_option("--length", gen.length)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--channels", gen.channels)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--train-count", gen.train_count)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--test-count", gen.test_count)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--noise", gen.noise);
  gen_cmd->add_option("--out-train", gen.out_train)->required();
  gen_cmd->add_option("--out-test", gen.out_test);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit);
    if (*ex_cmd) return cmd_explain(ex);
    if (*sel_cmd) return cmd_select(sel);
    if (*ev_cmd) return cmd_evaluate(ev);
    if (*gen_cmd) return cmd_gen_synth(gen);
  } catch (const std::exception& e) {
    std::cerr << "tscf: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
