#pragma once

#include <cstdint>
#include <string_view>

#include "tscf/core.hpp"

namespace tscf {

enum class SynthKind {
  SineSquare,  // 2 classes: noisy sine vs. noisy square wave
  Cbf,         // 3 classes: cylinder / bell / funnel plateaus
};

SynthKind parse_synth_kind(std::string_view name);

struct SynthSpec {
  SynthKind kind = SynthKind::SineSquare;
  std::size_t length = 64;
  std::size_t channels = 1;
  std::size_t count = 60;
  std::uint64_t seed = 0;
  /// Gaussian noise level; negative selects the per-kind default (0.3 for
  /// sine-square, 1.0 for CBF).
  double noise = -1.0;
};

/// Labels cycle through the classes (instance i has label i mod K). Every
/// channel is drawn independently from the same class template.
LabeledDataset generate_synthetic(const SynthSpec& spec);

}  // namespace tscf
