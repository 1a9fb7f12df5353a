#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "tscf/driver.hpp"
#include "tscf/json_io.hpp"

namespace tscf {

/// Contents of a config file: run parameters, utility weights and optional
/// model locations. Every field is optional in the file.
struct ExplainConfig {
  RunConfig run;
  UtilityWeights weights;
  std::optional<std::string> classifier;
  std::optional<std::string> scorer;
  std::optional<std::string> bridge;

  void validate() const;
};

/// Unknown keys and out-of-range values throw InvalidArgument.
ExplainConfig config_from_json(const json& doc);
json config_to_json(const ExplainConfig& cfg);
ExplainConfig load_config(const std::filesystem::path& path);

/// 64-bit FNV-1a of the compact dump, as 16 hex digits.
std::string config_hash(const json& config);

json objectives_to_json(const ObjectiveVector& v);
ObjectiveVector objectives_from_json(const json& doc);

/// Front file for one explained instance. `selected` is the utility-argmax
/// member under `weights`.
json front_to_json(std::size_t instance_id, const TimeSeriesInstance& x, const ParetoFront& front,
                   const ExplainConfig& cfg);

/// Front file for an instance whose explanation failed.
json front_error_to_json(std::size_t instance_id, const std::string& error);

struct FrontFile {
  std::size_t instance_id = 0;
  std::optional<std::string> error;
  TimeSeriesInstance original;
  ParetoFront front;
};

FrontFile front_from_json(const json& doc);

}  // namespace tscf
