#include "tscf/files.hpp"

#include <cstdio>
#include <set>

namespace tscf {

void ExplainConfig::validate() const {
  run.validate();
  weights.validate();
}

namespace {

[[noreturn]] void bad_config(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, "config: " + what);
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!obj.is_object()) bad_config(where + " must be an object");
  const std::set<std::string_view> ok(allowed);
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) bad_config("unknown key \"" + key + "\" in " + where);
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad_config(std::string("field \"") + key + "\" has the wrong type");
  }
}

void read_count(const json& obj, const char* key, std::size_t& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    bad_config(std::string("field \"") + key + "\" must be a non-negative integer");
  }
  out = v.get<std::size_t>();
}

MutationRates rates_from_json(const json& obj, MutationRates base, const std::string& where) {
  check_keys(obj, {"p_ext", "p_comp", "p_prune"}, where);
  read_field(obj, "p_ext", base.p_ext);
  read_field(obj, "p_comp", base.p_comp);
  read_field(obj, "p_prune", base.p_prune);
  return base;
}

json rates_to_json(const MutationRates& r) {
  return {{"p_ext", r.p_ext}, {"p_comp", r.p_comp}, {"p_prune", r.p_prune}};
}

}  // namespace

ExplainConfig config_from_json(const json& doc) {
  check_keys(doc,
             {"format_version", "population_size", "first_phase_mask", "common_generations",
              "independent_generations", "common_rates", "independent_rates", "init_percent",
              "init_increment", "reinit_generations", "gamma", "nu", "seed", "nun", "weights",
              "classifier", "scorer", "bridge", "eval_threads"},
             "config");
  if (doc.contains("format_version")) require_format_version(doc);
  ExplainConfig cfg;
  RunConfig& run = cfg.run;
  read_count(doc, "population_size", run.population_size);
  if (doc.contains("first_phase_mask")) {
    std::string kind;
    read_field(doc, "first_phase_mask", kind);
    if (kind == "common") {
      run.first_phase_kind = MaskKind::Common;
    } else if (kind == "independent") {
      run.first_phase_kind = MaskKind::Independent;
    } else {
      bad_config("first_phase_mask must be \"common\" or \"independent\"");
    }
  }
  read_count(doc, "common_generations", run.common_generations);
  read_count(doc, "independent_generations", run.independent_generations);
  read_count(doc, "reinit_generations", run.reinit_generations);
  read_count(doc, "eval_threads", run.eval_threads);
  if (doc.contains("common_rates")) {
    run.common_rates = rates_from_json(doc.at("common_rates"), run.common_rates, "common_rates");
  }
  if (doc.contains("independent_rates")) {
    run.independent_rates =
        rates_from_json(doc.at("independent_rates"), run.independent_rates, "independent_rates");
  }
  read_field(doc, "init_percent", run.init_percent);
  read_field(doc, "init_increment", run.init_increment);
  read_field(doc, "gamma", run.gamma);
  read_field(doc, "nu", run.nu);
  read_field(doc, "seed", run.seed);
  if (doc.contains("nun")) {
    const auto& nun = doc.at("nun");
    check_keys(nun, {"target_class", "by_label"}, "nun");
    if (nun.contains("target_class") && !nun.at("target_class").is_null()) {
      int target = 0;
      read_field(nun, "target_class", target);
      if (target < 0) bad_config("nun.target_class must be >= 0");
      run.nun.target_class = target;
    }
    read_field(nun, "by_label", run.nun.by_label);
  }
  if (doc.contains("weights")) {
    const auto& w = doc.at("weights");
    check_keys(w, {"adversarial", "sparsity", "subsequences", "plausibility"}, "weights");
    read_field(w, "adversarial", cfg.weights.adversarial);
    read_field(w, "sparsity", cfg.weights.sparsity);
    read_field(w, "subsequences", cfg.weights.subsequences);
    read_field(w, "plausibility", cfg.weights.plausibility);
  }
  for (auto [key, slot] : {std::pair{"classifier", &cfg.classifier}, std::pair{"scorer", &cfg.scorer},
                           std::pair{"bridge", &cfg.bridge}}) {
    if (doc.contains(key) && !doc.at(key).is_null()) {
      std::string v;
      read_field(doc, key, v);
      *slot = v;
    }
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const ExplainConfig& cfg) {
  const RunConfig& run = cfg.run;
  json nun = {{"by_label", run.nun.by_label}};
  nun["target_class"] = run.nun.target_class ? json(*run.nun.target_class) : json(nullptr);
  json out = {{"format_version", kFileFormatVersion},
              {"population_size", run.population_size},
              {"first_phase_mask",
               run.first_phase_kind == MaskKind::Common ? "common" : "independent"},
              {"common_generations", run.common_generations},
              {"independent_generations", run.independent_generations},
              {"common_rates", rates_to_json(run.common_rates)},
              {"independent_rates", rates_to_json(run.independent_rates)},
              {"init_percent", run.init_percent},
              {"init_increment", run.init_increment},
              {"reinit_generations", run.reinit_generations},
              {"gamma", run.gamma},
              {"nu", run.nu},
              {"seed", run.seed},
              {"nun", std::move(nun)},
              {"weights",
               {{"adversarial", cfg.weights.adversarial},
                {"sparsity", cfg.weights.sparsity},
                {"subsequences", cfg.weights.subsequences},
                {"plausibility", cfg.weights.plausibility}}}};
  return out;
}

ExplainConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json_file(path));
}

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json objectives_to_json(const ObjectiveVector& v) {
  return {{"o1", v.o1}, {"o2", v.o2}, {"o3", v.o3}, {"o4", v.o4}, {"valid", v.valid}};
}

ObjectiveVector objectives_from_json(const json& doc) {
  ObjectiveVector v;
  v.o1 = doc.at("o1").get<double>();
  v.o2 = doc.at("o2").get<double>();
  v.o3 = doc.at("o3").get<double>();
  v.o4 = doc.at("o4").get<double>();
  v.valid = doc.at("valid").get<bool>();
  return v;
}

json front_to_json(std::size_t instance_id, const TimeSeriesInstance& x, const ParetoFront& front,
                   const ExplainConfig& cfg) {
  json members = json::array();
  for (const auto& m : front.members) {
    members.push_back({{"mask", mask_to_json(m.mask)},
                       {"counterfactual", values_to_json(m.counterfactual)},
                       {"objectives", objectives_to_json(m.objectives)},
                       {"valid", m.objectives.valid}});
  }
  std::vector<ObjectiveVector> objectives;
  for (const auto& m : front.members) objectives.push_back(m.objectives);
  const json config = config_to_json(cfg);
  return {{"format_version", kFileFormatVersion},
          {"instance_id", instance_id},
          {"length", x.length()},
          {"channels", x.channels()},
          {"original_class", front.original_class},
          {"target_class", front.target_class},
          {"nun_index", front.nun_index},
          {"original", values_to_json(x)},
          {"nun", values_to_json(front.nun)},
          {"members", std::move(members)},
          {"selected", select_by_utility(objectives, cfg.weights)},
          {"provenance",
           {{"seed", cfg.run.seed}, {"config_hash", config_hash(config)}, {"config", config}}}};
}

json front_error_to_json(std::size_t instance_id, const std::string& error) {
  return {{"format_version", kFileFormatVersion}, {"instance_id", instance_id}, {"error", error}};
}

FrontFile front_from_json(const json& doc) {
  require_format_version(doc);
  FrontFile out;
  try {
    out.instance_id = doc.at("instance_id").get<std::size_t>();
    if (doc.contains("error")) {
      out.error = doc.at("error").get<std::string>();
      return out;
    }
    const auto length = doc.at("length").get<std::size_t>();
    const auto channels = doc.at("channels").get<std::size_t>();
    out.original = values_from_json(doc.at("original"), length, channels);
    auto& front = out.front;
    front.original_class = doc.at("original_class").get<ClassId>();
    front.target_class = doc.at("target_class").get<ClassId>();
    front.nun_index = doc.at("nun_index").get<std::size_t>();
    front.nun = values_from_json(doc.at("nun"), length, channels);
    for (const auto& m : doc.at("members")) {
      front.members.push_back({mask_from_json(m.at("mask"), length, channels),
                               values_from_json(m.at("counterfactual"), length, channels),
                               objectives_from_json(m.at("objectives"))});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptFile, std::string("front file: ") + e.what());
  }
  return out;
}

}  // namespace tscf
