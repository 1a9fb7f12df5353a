#include "tscf/json_io.hpp"
#include "tscf/models.hpp"

namespace tscf {

namespace {

json envelope(std::string_view type, json payload) {
  return {{"format_version", kModelFormatVersion},
          {"model_type", type},
          {"payload", std::move(payload)}};
}

NearestCentroidClassifier centroid_from_json(const json& p) {
  const auto length = p.at("length").get<std::size_t>();
  const auto channels = p.at("channels").get<std::size_t>();
  std::vector<TimeSeriesInstance> centroids;
  for (const auto& c : p.at("centroids")) {
    centroids.push_back(values_from_json(c, length, channels));
  }
  return {std::move(centroids), p.at("temperature").get<double>()};
}

KnnClassifier knn_from_json(const json& p) {
  return {dataset_from_json(p.at("train")), p.at("k").get<std::size_t>()};
}

LinearReconstructionScorer scorer_from_json(const json& p) {
  return {p.at("length").get<std::size_t>(), p.at("channels").get<std::size_t>(),
          p.at("mean").get<std::vector<double>>(),
          p.at("components").get<std::vector<std::vector<double>>>(),
          p.at("e_max").get<double>()};
}

}  // namespace

void save_model(const NearestCentroidClassifier& model, const std::filesystem::path& path) {
  json centroids = json::array();
  for (const auto& c : model.centroids()) centroids.push_back(values_to_json(c));
  write_json_file(path, envelope("nearest_centroid", {{"length", model.length()},
                                                      {"channels", model.channels()},
                                                      {"temperature", model.temperature()},
                                                      {"centroids", std::move(centroids)}}));
}

void save_model(const KnnClassifier& model, const std::filesystem::path& path) {
  write_json_file(path, envelope("knn", {{"k", model.k()}, {"train", dataset_to_json(model.train())}}));
}

void save_model(const LinearReconstructionScorer& model, const std::filesystem::path& path) {
  write_json_file(path, envelope("linear_reconstruction", {{"length", model.length()},
                                                           {"channels", model.channels()},
                                                           {"mean", model.mean()},
                                                           {"components", model.components()},
                                                           {"e_max", model.e_max()}}));
}

LoadedModel load_model(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  if (!doc.is_object() || !doc.contains("model_type") || !doc.contains("payload")) {
    throw Error(ErrorCode::CorruptFile, path.string() + ": not a model file");
  }
  require_format_version(doc, kModelFormatVersion);
  const auto& type_field = doc.at("model_type");
  if (!type_field.is_string()) {
    throw Error(ErrorCode::CorruptFile, "model_type is not a string");
  }
  const auto type = type_field.get<std::string>();
  const auto& payload = doc.at("payload");
  try {
    if (type == "nearest_centroid") return centroid_from_json(payload);
    if (type == "knn") return knn_from_json(payload);
    if (type == "linear_reconstruction") return scorer_from_json(payload);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptFile, path.string() + ": " + e.what());
  }
  throw Error(ErrorCode::UnknownModelType, "model_type \"" + type + "\"");
}

std::unique_ptr<ClassifierModel> load_classifier(const std::filesystem::path& path) {
  auto model = load_model(path);
  if (auto* m = std::get_if<NearestCentroidClassifier>(&model)) {
    return std::make_unique<NearestCentroidClassifier>(std::move(*m));
  }
  if (auto* m = std::get_if<KnnClassifier>(&model)) {
    return std::make_unique<KnnClassifier>(std::move(*m));
  }
  throw Error(ErrorCode::UnknownModelType, path.string() + " does not hold a classifier");
}

std::unique_ptr<OutlierScorer> load_scorer(const std::filesystem::path& path) {
  auto model = load_model(path);
  if (auto* m = std::get_if<LinearReconstructionScorer>(&model)) {
    return std::make_unique<LinearReconstructionScorer>(std::move(*m));
  }
  throw Error(ErrorCode::UnknownModelType, path.string() + " does not hold an outlier scorer");
}

}  // namespace tscf
