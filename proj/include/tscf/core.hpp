#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tscf/error.hpp"

namespace tscf {

using ClassId = int;

/// An L x C real-valued series. Storage is channel-major: channel 0's L values
/// come first, matching the layout of DatasetFile and of ChangeMask.
class TimeSeriesInstance {
 public:
  TimeSeriesInstance() = default;
  TimeSeriesInstance(std::size_t length, std::size_t channels, std::vector<double> values,
                     std::optional<ClassId> label = std::nullopt);

  static TimeSeriesInstance zeros(std::size_t length, std::size_t channels);

  std::size_t length() const noexcept { return length_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return values_.size(); }

  double at(std::size_t t, std::size_t c) const { return values_[c * length_ + t]; }
  double& at(std::size_t t, std::size_t c) { return values_[c * length_ + t]; }

  std::span<const double> flat() const noexcept { return values_; }
  std::span<const double> channel(std::size_t c) const {
    return std::span<const double>(values_).subspan(c * length_, length_);
  }

  const std::optional<ClassId>& label() const noexcept { return label_; }
  void set_label(std::optional<ClassId> label) { label_ = label; }

  bool same_shape(const TimeSeriesInstance& other) const noexcept {
    return length_ == other.length_ && channels_ == other.channels_;
  }

  friend bool operator==(const TimeSeriesInstance&, const TimeSeriesInstance&) = default;

 private:
  std::size_t length_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> values_;
  std::optional<ClassId> label_;
};

/// Flattened Euclidean distance. Throws DimensionMismatch on shape mismatch.
double euclidean_distance(const TimeSeriesInstance& a, const TimeSeriesInstance& b);

class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(std::vector<TimeSeriesInstance> instances, std::size_t class_count);

  std::size_t size() const noexcept { return instances_.size(); }
  bool empty() const noexcept { return instances_.empty(); }
  std::size_t length() const noexcept { return length_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t class_count() const noexcept { return class_count_; }

  const TimeSeriesInstance& operator[](std::size_t i) const { return instances_[i]; }
  const std::vector<TimeSeriesInstance>& instances() const noexcept { return instances_; }
  ClassId label(std::size_t i) const { return *instances_[i].label(); }

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

 private:
  std::vector<TimeSeriesInstance> instances_;
  std::size_t length_ = 0;
  std::size_t channels_ = 0;
  std::size_t class_count_ = 0;
};

enum class MaskKind { Common, Independent };

/// Binary change mask. A Common mask holds L bits shared by every channel; an
/// Independent mask holds L x C bits in channel-major order.
class ChangeMask {
 public:
  ChangeMask() = default;
  ChangeMask(MaskKind kind, std::size_t length, std::size_t channels);
  ChangeMask(MaskKind kind, std::size_t length, std::size_t channels, std::vector<bool> bits);

  static ChangeMask common(std::size_t length) { return {MaskKind::Common, length, 1}; }
  static ChangeMask independent(std::size_t length, std::size_t channels) {
    return {MaskKind::Independent, length, channels};
  }
  static ChangeMask ones(MaskKind kind, std::size_t length, std::size_t channels);
  /// Parses "0110"-style strings; Independent masks take one string per channel.
  static ChangeMask from_string(std::string_view bits);
  static ChangeMask from_strings(std::span<const std::string_view> channels);

  MaskKind kind() const noexcept { return kind_; }
  std::size_t length() const noexcept { return length_; }
  /// Number of channel rows stored: 1 for Common masks.
  std::size_t channels() const noexcept { return channels_; }
  std::size_t positions() const noexcept { return bits_.size(); }

  bool get(std::size_t t, std::size_t c = 0) const { return bits_[c * length_ + t]; }
  void set(std::size_t t, std::size_t c, bool v) { bits_[c * length_ + t] = v; }
  bool flat(std::size_t i) const { return bits_[i]; }
  void set_flat(std::size_t i, bool v) { bits_[i] = v; }
  const std::vector<bool>& bits() const noexcept { return bits_; }

  std::size_t popcount() const noexcept;
  std::string to_string() const;

  friend bool operator==(const ChangeMask&, const ChangeMask&) = default;

 private:
  MaskKind kind_ = MaskKind::Common;
  std::size_t length_ = 0;
  std::size_t channels_ = 1;
  std::vector<bool> bits_;
};

/// A maximal run of ones within one channel.
struct Subsequence {
  std::size_t start = 0;
  std::size_t channel = 0;
  std::size_t length = 0;

  std::size_t end() const noexcept { return start + length; }
  friend bool operator==(const Subsequence&, const Subsequence&) = default;
};

std::vector<Subsequence> decompose_mask(const ChangeMask& mask);

/// Union of the subsequences' supports. Throws OutOfBounds if a subsequence
/// leaves the L x C grid (for Common masks only channel 0 exists).
ChangeMask reconstruct_mask(std::span<const Subsequence> subs, std::size_t length,
                            std::size_t channels, MaskKind kind);

ChangeMask broadcast_mask(const ChangeMask& mask, std::size_t channels);

/// Returns `mask` itself when already Independent.
ChangeMask to_independent(const ChangeMask& mask, std::size_t channels);

/// Counterfactual synthesis: cells active in the mask take the donor's value.
TimeSeriesInstance apply_mask(const TimeSeriesInstance& x, const ChangeMask& mask,
                              const TimeSeriesInstance& nun);

/// Number of maximal runs of ones, counting a run that begins at t = 0.
std::size_t count_subsequences(const ChangeMask& mask);

}  // namespace tscf
