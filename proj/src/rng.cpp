#include "hetnet/rng.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace hetnet {

std::string_view to_string(StreamTag tag) {
  switch (tag) {
    case StreamTag::Pilots: return "pilots";
    case StreamTag::Channels: return "channels";
    case StreamTag::Noise: return "noise";
    case StreamTag::Activity: return "activity";
    case StreamTag::SeSampler: return "se-sampler";
  }
  return "unknown";
}

double Rng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  // 1 - uniform() lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::complex<double> Rng::complex_normal(double variance) {
  const double scale = std::sqrt(0.5 * variance);
  const double re = normal();
  const double im = normal();
  return {scale * re, scale * im};
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n <= 1) return 0;
  // Largest multiple of n representable; draws at or above it are rejected.
  const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return draw % n;
}

Rng seed_stream(std::uint64_t base_seed, std::uint64_t trial_index, StreamTag tag) {
  const std::array<std::uint32_t, 5> words = {
      static_cast<std::uint32_t>(base_seed),
      static_cast<std::uint32_t>(base_seed >> 32),
      static_cast<std::uint32_t>(trial_index),
      static_cast<std::uint32_t>(trial_index >> 32),
      static_cast<std::uint32_t>(tag),
  };
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

}  // namespace hetnet
