#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "tscf/core.hpp"

namespace tscf {

using json = nlohmann::json;

inline constexpr int kFileFormatVersion = 1;

/// Parses a whole file. Throws Io when unreadable and CorruptFile when the
/// content is not JSON.
json read_json_file(const std::filesystem::path& path);

/// Writes `doc.dump(2)` plus a trailing newline. Output is byte-stable for a
/// given document.
void write_json_file(const std::filesystem::path& path, const json& doc);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Values as C arrays of L reals.
json values_to_json(const TimeSeriesInstance& x);
TimeSeriesInstance values_from_json(const json& values, std::size_t length, std::size_t channels,
                                    std::optional<ClassId> label = std::nullopt);

json dataset_to_json(const LabeledDataset& data);
LabeledDataset dataset_from_json(const json& doc);

LabeledDataset load_dataset(const std::filesystem::path& path);
void save_dataset(const LabeledDataset& data, const std::filesystem::path& path);

/// Masks serialise as [start, channel, length] triples.
json mask_to_json(const ChangeMask& mask);
ChangeMask mask_from_json(const json& triples, std::size_t length, std::size_t channels,
                          MaskKind kind = MaskKind::Independent);

/// Checks the "format_version" field. Throws VersionMismatch.
void require_format_version(const json& doc, int expected = kFileFormatVersion);

}  // namespace tscf
