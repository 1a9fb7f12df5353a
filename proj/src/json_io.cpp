#include "tscf/json_io.hpp"

#include <fstream>
#include <sstream>

namespace tscf {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::CorruptFile, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw Error(ErrorCode::Io, "write failed for " + path.string());
  }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

void require_format_version(const json& doc, int expected) {
  if (!doc.is_object() || !doc.contains("format_version")) {
    throw Error(ErrorCode::CorruptFile, "missing format_version");
  }
  const auto& v = doc.at("format_version");
  if (!v.is_number_integer()) {
    throw Error(ErrorCode::CorruptFile, "format_version is not an integer");
  }
  if (v.get<int>() != expected) {
    throw Error(ErrorCode::VersionMismatch,
                "format_version " + v.dump() + ", expected " + std::to_string(expected));
  }
}

json values_to_json(const TimeSeriesInstance& x) {
  json channels = json::array();
  for (std::size_t c = 0; c < x.channels(); ++c) {
    auto ch = x.channel(c);
    channels.push_back(std::vector<double>(ch.begin(), ch.end()));
  }
  return channels;
}

TimeSeriesInstance values_from_json(const json& values, std::size_t length, std::size_t channels,
                                    std::optional<ClassId> label) {
  if (!values.is_array() || values.size() != channels) {
    throw Error(ErrorCode::CorruptFile, "values must hold one array per channel");
  }
  std::vector<double> flat;
  flat.reserve(length * channels);
  for (const auto& ch : values) {
    if (!ch.is_array() || ch.size() != length) {
      throw Error(ErrorCode::CorruptFile, "channel array length does not equal L");
    }
    for (const auto& v : ch) {
      if (!v.is_number()) throw Error(ErrorCode::CorruptFile, "non-numeric series value");
      flat.push_back(v.get<double>());
    }
  }
  return {length, channels, std::move(flat), label};
}

json dataset_to_json(const LabeledDataset& data) {
  json instances = json::array();
  for (const auto& inst : data.instances()) {
    instances.push_back({{"label", *inst.label()}, {"values", values_to_json(inst)}});
  }
  return {{"format_version", kFileFormatVersion},
          {"length", data.length()},
          {"channels", data.channels()},
          {"classes", data.class_count()},
          {"instances", std::move(instances)}};
}

LabeledDataset dataset_from_json(const json& doc) {
  require_format_version(doc);
  try {
    const auto length = doc.at("length").get<std::size_t>();
    const auto channels = doc.at("channels").get<std::size_t>();
    const auto classes = doc.at("classes").get<std::size_t>();
    std::vector<TimeSeriesInstance> instances;
    for (const auto& item : doc.at("instances")) {
      const int label = item.at("label").get<int>();
      instances.push_back(values_from_json(item.at("values"), length, channels, label));
    }
    return {std::move(instances), classes};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptFile, std::string("dataset: ") + e.what());
  }
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  return dataset_from_json(read_json_file(path));
}

void save_dataset(const LabeledDataset& data, const std::filesystem::path& path) {
  write_json_file(path, dataset_to_json(data));
}

json mask_to_json(const ChangeMask& mask) {
  json out = json::array();
  for (const auto& s : decompose_mask(mask)) out.push_back({s.start, s.channel, s.length});
  return out;
}

ChangeMask mask_from_json(const json& triples, std::size_t length, std::size_t channels,
                          MaskKind kind) {
  if (!triples.is_array()) throw Error(ErrorCode::CorruptFile, "mask must be an array");
  std::vector<Subsequence> subs;
  for (const auto& t : triples) {
    if (!t.is_array() || t.size() != 3) {
      throw Error(ErrorCode::CorruptFile, "mask entries must be [start, channel, length]");
    }
    subs.push_back({t[0].get<std::size_t>(), t[1].get<std::size_t>(), t[2].get<std::size_t>()});
  }
  return reconstruct_mask(subs, length, channels, kind);
}

}  // namespace tscf
