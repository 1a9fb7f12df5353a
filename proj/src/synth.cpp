#include "tscf/synth.hpp"

#include <cmath>
#include <numbers>

#include "tscf/rng.hpp"

namespace tscf {

SynthKind parse_synth_kind(std::string_view name) {
  if (name == "sine-square") return SynthKind::SineSquare;
  if (name == "cbf") return SynthKind::Cbf;
  throw Error(ErrorCode::InvalidArgument, "unknown synthetic dataset \"" + std::string(name) + "\"");
}

namespace {

double normal(RngStream& rng) {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double uniform(RngStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

void sine_square_channel(std::span<double> out, int label, double noise, RngStream& rng) {
  const auto length = static_cast<double>(out.size());
  const double cycles = uniform(rng, 1.8, 2.2);
  const double phase = uniform(rng, -0.4, 0.4);
  const double amplitude = uniform(rng, 0.8, 1.2);
  for (std::size_t t = 0; t < out.size(); ++t) {
    const double s = std::sin(2.0 * std::numbers::pi * cycles * static_cast<double>(t) / length + phase);
    const double base = label == 0 ? s : (s >= 0.0 ? 1.0 : -1.0);
    out[t] = amplitude * base + noise * normal(rng);
  }
}

void cbf_channel(std::span<double> out, int label, double noise, RngStream& rng) {
  const auto length = static_cast<double>(out.size());
  const double scale = length / 128.0;
  const double a = uniform(rng, 16.0, 32.0) * scale;
  const double b = a + uniform(rng, 32.0, 96.0) * scale;
  const double height = 6.0 + normal(rng);
  for (std::size_t t = 0; t < out.size(); ++t) {
    const auto tt = static_cast<double>(t);
    double shape = 0.0;
    if (tt >= a && tt <= b) {
      switch (label) {
        case 0: shape = 1.0; break;
        case 1: shape = (tt - a) / (b - a); break;
        default: shape = (b - tt) / (b - a); break;
      }
    }
    out[t] = height * shape + noise * normal(rng);
  }
}

}  // namespace

LabeledDataset generate_synthetic(const SynthSpec& spec) {
  if (spec.length < 2 || spec.channels == 0 || spec.count == 0) {
    throw Error(ErrorCode::InvalidArgument, "synthetic dataset needs L >= 2, C >= 1, n >= 1");
  }
  const int classes = spec.kind == SynthKind::SineSquare ? 2 : 3;
  if (spec.count < static_cast<std::size_t>(classes)) {
    throw Error(ErrorCode::InvalidArgument, "fewer instances than classes");
  }
  const double noise =
      spec.noise >= 0.0 ? spec.noise : (spec.kind == SynthKind::SineSquare ? 0.3 : 1.0);
  RngStream rng(spec.seed);
  std::vector<TimeSeriesInstance> instances;
  instances.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(classes));
    std::vector<double> values(spec.length * spec.channels);
    for (std::size_t c = 0; c < spec.channels; ++c) {
      std::span<double> ch(values.data() + c * spec.length, spec.length);
      if (spec.kind == SynthKind::SineSquare) {
        sine_square_channel(ch, label, noise, rng);
      } else {
        cbf_channel(ch, label, noise, rng);
      }
    }
    instances.emplace_back(spec.length, spec.channels, std::move(values), label);
  }
  return {std::move(instances), static_cast<std::size_t>(classes)};
}

}  // namespace tscf
