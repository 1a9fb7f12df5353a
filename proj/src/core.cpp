#include "tscf/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tscf {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NoUnlikeNeighbor: return "NoUnlikeNeighbor";
    case ErrorCode::NoValidSolution: return "NoValidSolution";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::BridgeProtocolError: return "BridgeProtocolError";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::UnknownModelType: return "UnknownModelType";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::MissingRanks: return "MissingRanks";
    case ErrorCode::EmptyFront: return "EmptyFront";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

TimeSeriesInstance::TimeSeriesInstance(std::size_t length, std::size_t channels,
                                       std::vector<double> values, std::optional<ClassId> label)
    : length_(length), channels_(channels), values_(std::move(values)), label_(label) {
  if (length_ == 0 || channels_ == 0) {
    throw Error(ErrorCode::InvalidArgument, "series needs L >= 1 and C >= 1");
  }
  if (values_.size() != length_ * channels_) {
    throw Error(ErrorCode::DimensionMismatch, "value count does not equal L * C");
  }
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorCode::InvalidArgument, "series contains non-finite values");
  }
  if (label_ && *label_ < 0) {
    throw Error(ErrorCode::InvalidArgument, "negative class label");
  }
}

TimeSeriesInstance TimeSeriesInstance::zeros(std::size_t length, std::size_t channels) {
  return {length, channels, std::vector<double>(length * channels, 0.0)};
}

double euclidean_distance(const TimeSeriesInstance& a, const TimeSeriesInstance& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::DimensionMismatch, "distance between series of different shape");
  }
  double acc = 0.0;
  auto fa = a.flat();
  auto fb = b.flat();
  for (std::size_t i = 0; i < fa.size(); ++i) {
    const double d = fa[i] - fb[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

LabeledDataset::LabeledDataset(std::vector<TimeSeriesInstance> instances, std::size_t class_count)
    : instances_(std::move(instances)), class_count_(class_count) {
  if (instances_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "dataset has no instances");
  }
  length_ = instances_.front().length();
  channels_ = instances_.front().channels();
  std::set<ClassId> seen;
  for (const auto& inst : instances_) {
    if (inst.length() != length_ || inst.channels() != channels_) {
      throw Error(ErrorCode::DimensionMismatch, "dataset instances differ in shape");
    }
    if (!inst.label()) {
      throw Error(ErrorCode::InvalidArgument, "dataset instance without label");
    }
    if (static_cast<std::size_t>(*inst.label()) >= class_count_) {
      throw Error(ErrorCode::InvalidArgument, "label outside [0, classes)");
    }
    seen.insert(*inst.label());
  }
  if (seen.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "dataset needs at least two distinct labels");
  }
}

ChangeMask::ChangeMask(MaskKind kind, std::size_t length, std::size_t channels)
    : ChangeMask(kind, length, channels,
                 std::vector<bool>(length * (kind == MaskKind::Common ? 1 : channels), false)) {}

ChangeMask::ChangeMask(MaskKind kind, std::size_t length, std::size_t channels,
                       std::vector<bool> bits)
    : kind_(kind),
      length_(length),
      channels_(kind == MaskKind::Common ? 1 : channels),
      bits_(std::move(bits)) {
  if (length_ == 0 || channels_ == 0) {
    throw Error(ErrorCode::InvalidArgument, "mask needs L >= 1 and C >= 1");
  }
  if (bits_.size() != length_ * channels_) {
    throw Error(ErrorCode::DimensionMismatch, "mask bit count does not match its shape");
  }
}

ChangeMask ChangeMask::ones(MaskKind kind, std::size_t length, std::size_t channels) {
  const std::size_t rows = kind == MaskKind::Common ? 1 : channels;
  return {kind, length, channels, std::vector<bool>(length * rows, true)};
}

namespace {

std::vector<bool> parse_bits(std::string_view s) {
  std::vector<bool> out;
  out.reserve(s.size());
  for (char ch : s) {
    if (ch != '0' && ch != '1') {
      throw Error(ErrorCode::InvalidArgument, "mask strings may only contain 0 and 1");
    }
    out.push_back(ch == '1');
  }
  return out;
}

}  // namespace

ChangeMask ChangeMask::from_string(std::string_view bits) {
  return {MaskKind::Common, bits.size(), 1, parse_bits(bits)};
}

ChangeMask ChangeMask::from_strings(std::span<const std::string_view> channels) {
  if (channels.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no channels given");
  }
  const std::size_t length = channels.front().size();
  std::vector<bool> bits;
  for (auto ch : channels) {
    if (ch.size() != length) {
      throw Error(ErrorCode::DimensionMismatch, "channel strings differ in length");
    }
    auto row = parse_bits(ch);
    bits.insert(bits.end(), row.begin(), row.end());
  }
  return {MaskKind::Independent, length, channels.size(), std::move(bits)};
}

std::size_t ChangeMask::popcount() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

std::string ChangeMask::to_string() const {
  std::string out;
  for (std::size_t c = 0; c < channels_; ++c) {
    if (c > 0) out.push_back('|');
    for (std::size_t t = 0; t < length_; ++t) out.push_back(get(t, c) ? '1' : '0');
  }
  return out;
}

std::vector<Subsequence> decompose_mask(const ChangeMask& mask) {
  std::vector<Subsequence> runs;
  const std::size_t length = mask.length();
  for (std::size_t c = 0; c < mask.channels(); ++c) {
    std::size_t t = 0;
    while (t < length) {
      if (!mask.get(t, c)) {
        ++t;
        continue;
      }
      const std::size_t start = t;
      while (t < length && mask.get(t, c)) ++t;
      runs.push_back({start, c, t - start});
    }
  }
  return runs;
}

ChangeMask reconstruct_mask(std::span<const Subsequence> subs, std::size_t length,
                            std::size_t channels, MaskKind kind) {
  ChangeMask mask(kind, length, channels);
  for (const auto& s : subs) {
    if (s.length == 0 || s.end() > length || s.channel >= mask.channels()) {
      throw Error(ErrorCode::OutOfBounds, "subsequence outside the mask");
    }
    for (std::size_t t = s.start; t < s.end(); ++t) mask.set(t, s.channel, true);
  }
  return mask;
}

ChangeMask broadcast_mask(const ChangeMask& mask, std::size_t channels) {
  if (mask.kind() != MaskKind::Common) {
    throw Error(ErrorCode::InvalidArgument, "broadcast_mask expects a Common mask");
  }
  ChangeMask out = ChangeMask::independent(mask.length(), channels);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t t = 0; t < mask.length(); ++t) out.set(t, c, mask.get(t));
  }
  return out;
}

ChangeMask to_independent(const ChangeMask& mask, std::size_t channels) {
  if (mask.kind() == MaskKind::Independent) {
    if (mask.channels() != channels) {
      throw Error(ErrorCode::DimensionMismatch, "mask channel count mismatch");
    }
    return mask;
  }
  return broadcast_mask(mask, channels);
}

TimeSeriesInstance apply_mask(const TimeSeriesInstance& x, const ChangeMask& mask,
                              const TimeSeriesInstance& nun) {
  if (!x.same_shape(nun)) {
    throw Error(ErrorCode::DimensionMismatch, "original and donor differ in shape");
  }
  if (mask.length() != x.length() ||
      (mask.kind() == MaskKind::Independent && mask.channels() != x.channels())) {
    throw Error(ErrorCode::DimensionMismatch, "mask does not match the series shape");
  }
  const bool common = mask.kind() == MaskKind::Common;
  std::vector<double> values(x.flat().begin(), x.flat().end());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t t = 0; t < x.length(); ++t) {
      if (mask.get(t, common ? 0 : c)) values[c * x.length() + t] = nun.at(t, c);
    }
  }
  return {x.length(), x.channels(), std::move(values)};
}

std::size_t count_subsequences(const ChangeMask& mask) {
  std::size_t n = 0;
  for (std::size_t c = 0; c < mask.channels(); ++c) {
    for (std::size_t t = 0; t < mask.length(); ++t) {
      if (mask.get(t, c) && (t == 0 || !mask.get(t - 1, c))) ++n;
    }
  }
  return n;
}

}  // namespace tscf
