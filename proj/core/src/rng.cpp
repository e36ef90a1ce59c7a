#include "edgelab/rng.hpp"

#include <cmath>
#include <numbers>

namespace edgelab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter c, Key k) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

CounterEngine::CounterEngine(std::uint64_t key) noexcept
    : key64_(key),
      key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

Philox4x32::Counter CounterEngine::block(std::uint64_t index, std::uint32_t lane) const noexcept {
  return Philox4x32::apply(
      {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), lane, 0u},
      key_);
}

std::uint64_t Rng::next_u64() noexcept {
  if (buffered_ == 0) {
    buffer_ = engine_.block(counter_++, lane_);
    buffered_ = 2;
  }
  const int slot = 2 - buffered_;
  --buffered_;
  return (static_cast<std::uint64_t>(buffer_[2 * slot]) << 32) | buffer_[2 * slot + 1];
}

double Rng::normal() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::exponential() noexcept { return -std::log(uniform()); }

double Rng::gamma(double shape) noexcept { return gamma_centered(shape) + shape; }

double Rng::gamma_centered(double shape) noexcept {
  if (shape < 1.0) {
    // G(shape) = G(shape + 1) * U^(1/shape)
    const double g = gamma_centered(shape + 1.0) + shape + 1.0;
    return g * std::pow(uniform(), 1.0 / shape) - shape;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * (v - 1.0) - 1.0 / 3.0;
  }
}

}  // namespace edgelab
