#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "tscf/models.hpp"

namespace tscf {

struct BridgeOptions {
  std::chrono::milliseconds timeout{30'000};
  /// When set, every request/response pair is appended as one JSON line
  /// {"request":..., "response":...}.
  std::optional<std::filesystem::path> transcript;
};

/// Classifier served by a child process speaking newline-delimited JSON on
/// its stdin/stdout.
///
///   -> {"op":"info"}                          <- {"classes":K,"length":L,"channels":C}
///   -> {"op":"predict_proba","instances":[..]} <- {"proba":[[...],...]}
///
/// Instances are sent as C arrays of L reals. One request is in flight at a
/// time; calls from several threads are serialised.
class ExternalModelBridge final : public ClassifierModel {
 public:
  /// Runs `command` through /bin/sh and performs the info handshake.
  explicit ExternalModelBridge(const std::string& command, BridgeOptions options = {});
  ~ExternalModelBridge() override;

  ExternalModelBridge(const ExternalModelBridge&) = delete;
  ExternalModelBridge& operator=(const ExternalModelBridge&) = delete;

  std::vector<ProbabilityVector> predict_proba(
      std::span<const TimeSeriesInstance> batch) const override;
  using ClassifierModel::predict_proba;

  std::size_t class_count() const override { return classes_; }
  std::size_t length() const override { return length_; }
  std::size_t channels() const override { return channels_; }
  bool thread_safe() const override { return false; }

 private:
  nlohmann::json exchange(const nlohmann::json& request) const;
  void write_line(const std::string& line) const;
  std::string read_line() const;
  void shutdown() noexcept;

  BridgeOptions options_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::size_t classes_ = 0;
  std::size_t length_ = 0;
  std::size_t channels_ = 0;

  mutable std::mutex mutex_;
  mutable std::string read_buffer_;
  mutable bool broken_ = false;
  mutable std::ofstream transcript_;
};

/// Validates one "proba" payload against the expected shape. Rows whose sum
/// falls in [0.99, 1.01] are renormalised; anything else is a protocol error.
std::vector<ProbabilityVector> parse_proba_response(const nlohmann::json& response,
                                                    std::size_t batch_size,
                                                    std::size_t class_count);

}  // namespace tscf
