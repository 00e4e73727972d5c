#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace mimolink {

// Every random draw in the simulator is keyed by a (master, stream) pair.
// Trials, noise realizations and channel realizations get their own streams
// so that results do not depend on thread scheduling or evaluation order.
struct Seed {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;
};

// SplitMix64 finalizer. Used only for key mixing, never for output draws.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Order-sensitive combination of two 64-bit keys.
inline std::uint64_t combine64(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (mix64(b) + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
}

// Stream id for one purpose within one trial. `purpose` separates channel,
// noise and source draws; `key` separates grid cells where needed.
inline std::uint64_t derive_stream(std::uint64_t purpose, std::uint64_t key,
                                   std::uint64_t trial) {
  return combine64(combine64(purpose, key), trial);
}

inline Seed substream(const Seed& s, std::uint64_t tag) {
  return Seed{s.master, combine64(s.stream, tag)};
}

// Deterministic per-stream generator: a Mersenne Twister seeded from the
// mixed (master, stream) key. Gaussians come from an explicit Box-Muller
// transform on 53-bit uniforms, so the draw sequence is fully specified by
// this header (no implementation-defined distributions involved).
class Rng {
 public:
  explicit Rng(const Seed& seed)
      : eng_(combine64(mix64(seed.master), seed.stream)) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe under log().
  double uniform01_open_low() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal, Box-Muller; the second value of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform01_open_low()));
    const double t = 2.0 * std::numbers::pi * uniform01();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  // Circularly-symmetric complex Gaussian with E|z|^2 = 1: magnitude^2 is
  // Exp(1), phase uniform. Real and imaginary parts are N(0, 1/2).
  std::complex<double> complex_normal() {
    const double r = std::sqrt(-std::log(uniform01_open_low()));
    const double t = 2.0 * std::numbers::pi * uniform01();
    return {r * std::cos(t), r * std::sin(t)};
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Purpose tags for derive_stream. Channel streams are keyed by (nr, trial)
// only, so sweep cells that differ in SNR, scheme or bandwidth ratio see
// common channel realizations (common random numbers).
inline constexpr std::uint64_t kStreamChannel = 1;
inline constexpr std::uint64_t kStreamNoise = 2;
inline constexpr std::uint64_t kStreamSource = 3;

}  // namespace mimolink
