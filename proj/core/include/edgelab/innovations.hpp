#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "edgelab/rng.hpp"

namespace edgelab {

/// Law of the i.i.d. driving noise. All built-in laws are centered.
class InnovationLaw {
 public:
  enum class Kind { Rademacher, StandardNormal, CenteredExponential, Uniform, Custom };

  static InnovationLaw rademacher() { return InnovationLaw(Kind::Rademacher); }
  static InnovationLaw standard_normal() { return InnovationLaw(Kind::StandardNormal); }
  /// Exp(rate) - 1/rate.
  static InnovationLaw centered_exponential(double rate = 1.0);
  /// Uniform on (-1/2, 1/2).
  static InnovationLaw uniform() { return InnovationLaw(Kind::Uniform); }
  /// Discrete law on `values` with probabilities `probs`; must be centered.
  static InnovationLaw custom(std::vector<double> values, std::vector<double> probs);

  Kind kind() const noexcept { return kind_; }
  double rate() const noexcept { return rate_; }
  const std::vector<double>& table_values() const noexcept { return values_; }
  const std::vector<double>& table_probs() const noexcept { return probs_; }

  double variance() const noexcept { return raw_moment(2); }
  double third_moment() const noexcept { return raw_moment(3); }
  double fourth_moment() const noexcept { return raw_moment(4); }
  /// E eps^k for k in 0..4 (the law is centered, so these are central).
  double raw_moment(int k) const noexcept;
  bool symmetric() const noexcept;

  std::complex<double> cf(double t) const noexcept;
  /// Maps a 128-bit block to one draw (all kinds except Rademacher, which
  /// uses one bit per draw and is handled by InnovationStream).
  double from_block(const Philox4x32::Counter& block) const noexcept;
  double sample(Rng& rng) const noexcept;

  std::string name() const;
  static InnovationLaw from_name(const std::string& name, double rate = 1.0);

  friend bool operator==(const InnovationLaw&, const InnovationLaw&) = default;

 private:
  explicit InnovationLaw(Kind k) : kind_(k) {}

  Kind kind_;
  double rate_ = 1.0;
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

/// Deterministic innovation source. The value at `index` depends only on
/// (seed, stream_id, index) and the law.
class InnovationStream {
 public:
  InnovationStream(std::uint64_t seed, std::uint64_t stream_id, InnovationLaw law);

  /// Lanes partition the index space of one stream: lane 0 carries
  /// eps_1, eps_2, ...; lane 1 the past eps_0, eps_-1, ...; lane 2 the
  /// independent copy eps'_0, eps'_-1, ...; higher lanes are side channels.
  enum Lane : std::uint32_t { kPresent = 0, kPast = 1, kCoupledPast = 2, kSide = 3 };
  InnovationStream lane(std::uint32_t lane) const;
  std::uint32_t lane_id() const noexcept { return lane_; }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  const InnovationLaw& law() const noexcept { return law_; }
  std::uint64_t key() const noexcept { return engine_.key(); }

  double value(std::uint64_t index) const noexcept;
  void fill(std::uint64_t first_index, std::span<double> out) const noexcept;
  /// Sum of values at first_index .. first_index + count - 1. Uses popcount
  /// for Rademacher laws.
  double sum(std::uint64_t first_index, std::uint64_t count) const noexcept;

  /// Independent stream derived from (this, j); used for replicate j.
  InnovationStream substream(std::uint64_t j) const;
  /// Same key space, different law (for side channels such as smoothing draws).
  InnovationStream with_law(InnovationLaw law) const;
  /// Sequential generator on a private lane of this stream.
  Rng sequential(std::uint32_t lane) const noexcept { return Rng(engine_.key(), lane + 64); }

  std::string fingerprint() const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  InnovationLaw law_;
  CounterEngine engine_;
  std::uint32_t lane_ = kPresent;
};

/// Convenience wrapper used by tests and the CLI.
std::vector<double> gen_innovations(const InnovationStream& stream, std::size_t count);

}  // namespace edgelab
