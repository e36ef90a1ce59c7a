#pragma once

#include <array>
#include <cstdint>

namespace edgelab {

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11).
/// Output is a pure function of (key, counter); there is no hidden state.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept;
};

/// SplitMix64 finalizer; used to derive keys and substream ids.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(mix64(a) ^ (b + 0x632BE59BD9B4E019ULL));
}

/// Uniform in (0, 1) from 53 random bits; never returns 0 or 1.
constexpr double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Random-access block generator for one key. `block(i, lane)` is the
/// 128-bit Philox output for counter (i, lane).
class CounterEngine {
 public:
  CounterEngine() = default;
  explicit CounterEngine(std::uint64_t key) noexcept;

  Philox4x32::Counter block(std::uint64_t index, std::uint32_t lane = 0) const noexcept;
  std::uint64_t key() const noexcept { return key64_; }

 private:
  std::uint64_t key64_ = 0;
  Philox4x32::Key key_{};
};

/// Sequential view over a CounterEngine lane, for samplers that consume a
/// variable number of uniforms (rejection, Gamma). Two Rng objects built
/// from the same (key, lane) produce the same sequence.
class Rng {
 public:
  Rng(std::uint64_t key, std::uint32_t lane) noexcept : engine_(key), lane_(lane) {}

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept { return to_open_unit(next_u64()); }
  double normal() noexcept;
  double exponential() noexcept;
  /// Gamma(shape, rate=1). Marsaglia-Tsang for shape >= 1, boosted below.
  double gamma(double shape) noexcept;
  /// Gamma(shape, 1) - shape, computed without cancellation for large shapes.
  double gamma_centered(double shape) noexcept;

 private:
  CounterEngine engine_;
  std::uint32_t lane_;
  std::uint64_t counter_ = 0;
  Philox4x32::Counter buffer_{};
  int buffered_ = 0;
};

}  // namespace edgelab
