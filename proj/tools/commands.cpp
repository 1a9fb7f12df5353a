#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "tscf/bridge.hpp"
#include "tscf/driver.hpp"
#include "tscf/eval.hpp"
#include "tscf/files.hpp"
#include "tscf/json_io.hpp"
#include "tscf/models.hpp"
#include "tscf/neighbors.hpp"
#include "tscf/synth.hpp"

namespace tscf::cli {

namespace fs = std::filesystem;

namespace {

int fail(int code, const std::string& message) {
  std::cerr << "tscf: " << message << '\n';
  return code;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::NoUnlikeNeighbor: return kNoUnlikeNeighbor;
    case ErrorCode::NoValidSolution: return kNoValidSolution;
    default: return kUsage;
  }
}

std::unique_ptr<ClassifierModel> open_classifier(const ModelArgs& m) {
  if (!m.bridge.empty() && !m.classifier.empty()) {
    throw Error(ErrorCode::InvalidArgument, "give either --classifier or --bridge, not both");
  }
  if (!m.bridge.empty()) {
    BridgeOptions opts;
    opts.timeout = std::chrono::milliseconds(m.bridge_timeout_ms);
    return std::make_unique<ExternalModelBridge>(m.bridge, opts);
  }
  if (m.classifier.empty()) {
    throw Error(ErrorCode::InvalidArgument, "a classifier (--classifier or --bridge) is required");
  }
  return load_classifier(m.classifier);
}

std::unique_ptr<OutlierScorer> open_scorer(const ModelArgs& m) {
  if (m.scorer.empty()) throw Error(ErrorCode::InvalidArgument, "--scorer is required");
  return load_scorer(m.scorer);
}

void check_model_shape(const ClassifierModel& model, const LabeledDataset& data) {
  if (model.length() != data.length() || model.channels() != data.channels()) {
    throw Error(ErrorCode::DimensionMismatch, "classifier shape does not match the dataset");
  }
  if (model.class_count() < data.class_count()) {
    throw Error(ErrorCode::DimensionMismatch, "classifier knows fewer classes than the dataset");
  }
}

std::string front_file_name(std::size_t id) {
  std::ostringstream os;
  os << "front_";
  os.width(5);
  os.fill('0');
  os << id << ".json";
  return os.str();
}

}  // namespace

std::vector<std::size_t> parse_instance_selector(const std::string& text, std::size_t count) {
  auto number = [&](const std::string& s) -> std::size_t {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (s.empty() || pos != s.size() || s[0] == '-') {
      throw Error(ErrorCode::InvalidArgument, "bad instance index \"" + s + "\"");
    }
    if (v >= count) {
      throw Error(ErrorCode::OutOfBounds, "instance " + s + " beyond the split size " +
                                              std::to_string(count));
    }
    return static_cast<std::size_t>(v);
  };
  std::vector<std::size_t> ids;
  if (text == "all") {
    for (std::size_t i = 0; i < count; ++i) ids.push_back(i);
    return ids;
  }
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const std::size_t lo = number(text.substr(0, dots));
    const std::size_t hi = number(text.substr(dots + 2));
    if (hi < lo) throw Error(ErrorCode::InvalidArgument, "empty instance range");
    for (std::size_t i = lo; i <= hi; ++i) ids.push_back(i);
    return ids;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) ids.push_back(number(item));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.empty()) throw Error(ErrorCode::InvalidArgument, "no instances selected");
  return ids;
}

int cmd_fit(const FitArgs& args) {
  try {
    if (args.model != "centroid" && args.model != "knn" && args.model != "none") {
      return fail(kUsage, "unknown model kind \"" + args.model + "\"");
    }
    const LabeledDataset train = load_dataset(args.train);
    if (args.model != "none") {
      if (args.out.empty()) return fail(kUsage, "--out is required to save the classifier");
      std::unique_ptr<ClassifierModel> model;
      if (args.model == "centroid") {
        auto m = fit_nearest_centroid(train, args.temperature);
        save_model(m, args.out);
        model = std::make_unique<NearestCentroidClassifier>(std::move(m));
      } else {
        auto m = fit_knn(train, args.k);
        save_model(m, args.out);
        model = std::make_unique<KnnClassifier>(std::move(m));
      }
      const auto predicted = model->predict(std::span<const TimeSeriesInstance>(train.instances()));
      std::size_t correct = 0;
      for (std::size_t i = 0; i < train.size(); ++i) correct += predicted[i] == train.label(i);
      std::cout << "train_accuracy " << static_cast<double>(correct) / static_cast<double>(train.size())
                << '\n';
    }
    if (!args.scorer_out.empty()) {
      const std::size_t d =
          args.components.value_or(default_component_count(train.length(), train.channels()));
      const auto scorer = fit_linear_scorer(train, d);
      save_model(scorer, args.scorer_out);
      std::cout << "e_max " << scorer.e_max() << '\n';
    }
    if (args.model == "none" && args.scorer_out.empty()) {
      return fail(kUsage, "nothing to fit: pass a classifier kind or --scorer-out");
    }
    return kOk;
  } catch (const Error& e) {
    return fail(kUsage, e.what());
  }
}

int cmd_explain(const ExplainArgs& args) {
  ExplainConfig cfg;
  LabeledDataset test;
  LabeledDataset train;
  std::unique_ptr<ClassifierModel> classifier;
  std::unique_ptr<OutlierScorer> scorer;
  std::vector<std::size_t> ids;
  try {
    if (!args.config.empty()) cfg = load_config(args.config);
    if (const char* env = std::getenv("TSCF_SEED"); env != nullptr && *env != '\0') {
      try {
        cfg.run.seed = std::stoull(env);
      } catch (const std::exception&) {
        return fail(kUsage, "TSCF_SEED is not an unsigned integer");
      }
    }
    if (args.seed) cfg.run.seed = *args.seed;
    if (args.nun_target_class) cfg.run.nun.target_class = *args.nun_target_class;
    if (args.nun_by_label) cfg.run.nun.by_label = true;

    ModelArgs models = args.models;
    if (models.classifier.empty() && models.bridge.empty()) {
      models.classifier = cfg.classifier.value_or("");
      models.bridge = cfg.bridge.value_or("");
    }
    if (models.scorer.empty()) models.scorer = cfg.scorer.value_or("");
    cfg.validate();

    test = load_dataset(args.test);
    train = load_dataset(args.train);
    if (!test.instances().front().same_shape(train.instances().front())) {
      return fail(kUsage, "test and train splits differ in shape");
    }
    classifier = open_classifier(models);
    scorer = open_scorer(models);
    check_model_shape(*classifier, train);
    if (const auto& t = cfg.run.nun.target_class;
        t && (*t < 0 || static_cast<std::size_t>(*t) >= classifier->class_count())) {
      return fail(kUsage, "--nun-target-class " + std::to_string(*t) + " is out of range");
    }
    ids = parse_instance_selector(args.instances, test.size());
    if (args.out.empty()) return fail(kUsage, "--out is required");
    fs::create_directories(args.out);
  } catch (const Error& e) {
    return fail(kUsage, e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(kUsage, e.what());
  }

  std::vector<ClassId> train_classes;
  if (cfg.run.nun.by_label) {
    for (std::size_t i = 0; i < train.size(); ++i) train_classes.push_back(train.label(i));
  } else {
    train_classes = classifier->predict(std::span<const TimeSeriesInstance>(train.instances()));
  }

  struct Outcome {
    json doc;
    double seconds = 0.0;
    std::optional<Error> error;
    std::size_t members = 0;
  };
  std::vector<Outcome> outcomes(ids.size());
  std::mutex log_mutex;

  auto explain_one = [&](std::size_t slot) {
    const std::size_t id = ids[slot];
    Outcome& out = outcomes[slot];
    const auto start = std::chrono::steady_clock::now();
    try {
      const TimeSeriesInstance& x = test[id];
      const ClassId original = classifier->predict(x);
      const NunResult nun = find_nun(train, train_classes, x, original, cfg.run.nun.target_class);
      RunConfig run = cfg.run;
      run.seed = cfg.run.seed + id;
      TraceSink sink;
      if (args.verbose) {
        sink = [&, id](const std::string& line) {
          std::lock_guard lock(log_mutex);
          std::cerr << "[instance " << id << "] " << line << '\n';
        };
      }
      const auto result = run_multispace(x, nun, original, *classifier, *scorer, run, sink);
      out.doc = front_to_json(id, x, result.front, cfg);
      out.members = result.front.members.size();
    } catch (const Error& e) {
      out.error = e;
      out.doc = front_error_to_json(id, e.what());
    } catch (const std::exception& e) {
      out.error = Error(ErrorCode::InvalidArgument, e.what());
      out.doc = front_error_to_json(id, e.what());
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const std::size_t jobs = classifier->thread_safe() ? std::max<std::size_t>(1, args.jobs) : 1;
  if (jobs == 1) {
    for (std::size_t s = 0; s < ids.size(); ++s) {
      explain_one(s);
      if (outcomes[s].error && !args.keep_going) break;
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(jobs, ids.size()); ++w) {
      pool.emplace_back([&] {
        for (std::size_t s = next++; s < ids.size() && !stop; s = next++) {
          explain_one(s);
          if (outcomes[s].error && !args.keep_going) stop = true;
        }
      });
    }
  }

  for (std::size_t s = 0; s < ids.size(); ++s) {
    if (outcomes[s].error && !args.keep_going) {
      return fail(exit_code_for(*outcomes[s].error),
                  "instance " + std::to_string(ids[s]) + ": " + outcomes[s].error->what());
    }
  }

  json timings = json::object();
  try {
    for (std::size_t s = 0; s < ids.size(); ++s) {
      write_json_file(fs::path(args.out) / front_file_name(ids[s]), outcomes[s].doc);
      timings[std::to_string(ids[s])] = outcomes[s].seconds;
      std::cout << "instance " << ids[s] << ": ";
      if (outcomes[s].error) {
        std::cout << "error " << outcomes[s].error->what() << '\n';
      } else {
        std::cout << outcomes[s].members << " front members\n";
      }
    }
    if (args.timings) {
      write_json_file(fs::path(args.out) / "timings.json",
                      {{"format_version", kFileFormatVersion}, {"wall_time_s", timings}});
    }
  } catch (const Error& e) {
    return fail(kUsage, e.what());
  }
  return kOk;
}

int cmd_select(const SelectArgs& args) {
  try {
    const FrontFile file = front_from_json(read_json_file(args.front));
    if (file.error) return fail(kUsage, "front file records an error: " + *file.error);
    UtilityWeights w;
    if (!args.config.empty()) w = load_config(args.config).weights;
    if (!args.weights.empty()) {
      if (args.weights.size() != 4) return fail(kUsage, "--weights takes four values");
      w = {args.weights[0], args.weights[1], args.weights[2], args.weights[3]};
    }
    w.validate();
    std::vector<ObjectiveVector> objectives;
    for (const auto& m : file.front.members) objectives.push_back(m.objectives);
    const std::size_t best = select_by_utility(objectives, w);
    const auto& member = file.front.members[best];
    const json doc = {{"format_version", kFileFormatVersion},
                      {"instance_id", file.instance_id},
                      {"member_index", best},
                      {"utility", w.utility(member.objectives)},
                      {"weights",
                       {{"adversarial", w.adversarial},
                        {"sparsity", w.sparsity},
                        {"subsequences", w.subsequences},
                        {"plausibility", w.plausibility}}},
                      {"mask", mask_to_json(member.mask)},
                      {"counterfactual", values_to_json(member.counterfactual)},
                      {"objectives", objectives_to_json(member.objectives)}};
    if (args.out.empty()) {
      std::cout << doc.dump(2) << '\n';
    } else {
      write_json_file(args.out, doc);
    }
    return kOk;
  } catch (const Error& e) {
    return fail(kUsage, e.what());
  }
}

int cmd_evaluate(const EvaluateArgs& args) {
  try {
    if (!fs::is_directory(args.dir)) return fail(kUsage, args.dir + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(args.dir)) {
      const auto name = entry.path().filename().string();
      if (entry.is_regular_file() && name.starts_with("front_") && name.ends_with(".json")) {
        files.push_back(entry.path());
      }
    }
    if (files.empty()) return fail(kUsage, "no front files in " + args.dir);
    std::sort(files.begin(), files.end());

    const LabeledDataset train = load_dataset(args.train);
    const auto classifier = open_classifier(args.models);
    const auto scorer = open_scorer(args.models);
    check_model_shape(*classifier, train);
    const auto train_errs = training_errors(*scorer, train);

    json timings;
    if (const auto t = fs::path(args.dir) / "timings.json"; fs::exists(t)) {
      timings = read_json_file(t).at("wall_time_s");
    }

    BatchReport report;
    MethodReport ours{Method::MultiSpace, {}, {}};
    MethodReport swap{Method::FullSwap, {}, {}};
    for (const auto& path : files) {
      const FrontFile file = front_from_json(read_json_file(path));
      report.selected.push_back(file.instance_id);
      if (file.error) {
        MetricsRecord rec;
        rec.instance_id = file.instance_id;
        rec.error = file.error;
        ours.records.push_back(rec);
        swap.records.push_back(rec);
        continue;
      }
      const json doc = read_json_file(path);
      UtilityWeights w;
      if (doc.contains("provenance")) {
        w = config_from_json(doc.at("provenance").at("config")).weights;
      }
      const auto& best = select_by_utility(file.front, w);
      MetricsRecord rec = measure(file.instance_id, file.original, {best.mask, best.counterfactual},
                                  file.front.target_class, *classifier, *scorer, train_errs);
      const auto key = std::to_string(file.instance_id);
      if (timings.is_object() && timings.contains(key)) rec.wall_time_s = timings.at(key).get<double>();
      ours.records.push_back(rec);
      if (args.baseline) {
        swap.records.push_back(measure(file.instance_id, file.original,
                                       baseline_full_swap(file.original, file.front.nun),
                                       file.front.target_class, *classifier, *scorer, train_errs));
      }
    }
    ours.aggregates = aggregate(ours.records);
    report.methods.push_back(std::move(ours));
    if (args.baseline) {
      swap.aggregates = aggregate(swap.records);
      report.methods.push_back(std::move(swap));
    }
    report.ranking = rank_methods(report.methods);

    const json doc = report_to_json(report);
    if (args.out.empty()) {
      std::cout << doc.dump(2) << '\n';
    } else {
      write_json_file(args.out, doc);
    }
    if (!args.csv.empty()) write_text_file(args.csv, report_to_csv(report));
    const auto& agg = report.methods.front().aggregates;
    std::cerr << "validity " << agg.at("validity").dump() << " sparsity " << agg.at("sparsity").dump()
              << '\n';
    return kOk;
  } catch (const Error& e) {
    return fail(kUsage, e.what());
  } catch (const json::exception& e) {
    return fail(kUsage, e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(kUsage, e.what());
  }
}

int cmd_gen_synth(const GenSynthArgs& args) {
  try {
    SynthSpec spec;
    spec.kind = parse_synth_kind(args.kind);
    spec.length = args.length;
    spec.channels = args.channels;
    spec.noise = args.noise;
    spec.count = args.train_count;
    spec.seed = args.seed;
    save_dataset(generate_synthetic(spec), args.out_train);
    if (!args.out_test.empty()) {
      spec.count = args.test_count;
      // Independent stream for the test split.
      spec.seed = args.seed ^ 0x9e3779b97f4a7c15ULL;
      save_dataset(generate_synthetic(spec), args.out_test);
    }
    return kOk;
  } catch (const Error& e) {
    return fail(kUsage, e.what());
  }
}

}  // namespace tscf::cli
