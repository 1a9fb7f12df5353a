#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tscf {

enum class ErrorCode {
  InvalidArgument,
  OutOfBounds,
  DimensionMismatch,
  NoUnlikeNeighbor,
  NoValidSolution,
  EmptyClass,
  DegenerateData,
  BridgeProtocolError,
  Timeout,
  UnknownModelType,
  VersionMismatch,
  CorruptFile,
  MissingRanks,
  EmptyFront,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tscf
