#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace hetnet {

// Every random quantity in a trial is drawn from its own stream so that
// changing, e.g., the pilot strategy leaves channels, noise and activity
// untouched (common random numbers across sweep points).
enum class StreamTag : std::uint32_t {
  Pilots = 1,
  Channels = 2,
  Noise = 3,
  Activity = 4,
  SeSampler = 5,
};

std::string_view to_string(StreamTag tag);

// Seeded random stream. Only the raw mt19937_64 output is consumed and every
// distribution below is implemented here, so a given seed produces the same
// sequence with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  explicit Rng(std::seed_seq& seq) : engine_(seq) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal, Box-Muller with the second variate cached.
  double normal();

  // Circularly symmetric CN(0, variance).
  std::complex<double> complex_normal(double variance = 1.0);

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform on {0, ..., n-1}; rejection sampling removes modulo bias.
  std::uint64_t uniform_index(std::uint64_t n);

  // +1 or -1 with equal probability.
  double sign() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// Derives the stream for (base seed, trial index, purpose). The triple is
// split into 32-bit words and fed to std::seed_seq, whose mixing algorithm is
// fixed by the standard, so streams are identical across platforms.
Rng seed_stream(std::uint64_t base_seed, std::uint64_t trial_index, StreamTag tag);

}  // namespace hetnet
