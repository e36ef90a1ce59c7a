#include "edgelab/innovations.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "edgelab/error.hpp"

namespace edgelab {

namespace {

inline std::uint64_t lo_word(const Philox4x32::Counter& b) {
  return (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
}
inline std::uint64_t hi_word(const Philox4x32::Counter& b) {
  return (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
}

}  // namespace

InnovationLaw InnovationLaw::centered_exponential(double rate) {
  if (!(rate > 0.0)) throw InvalidArgument("centered exponential: rate must be positive");
  InnovationLaw law(Kind::CenteredExponential);
  law.rate_ = rate;
  return law;
}

InnovationLaw InnovationLaw::custom(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size())
    throw InvalidArgument("custom law: values and probs must be non-empty and equally long");
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12 ||
      std::any_of(probs.begin(), probs.end(), [](double p) { return p < 0.0; }))
    throw InvalidArgument("custom law: probabilities must be nonnegative and sum to 1");
  double mean = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    mean += values[i] * probs[i];
    scale += std::abs(values[i]) * probs[i];
  }
  if (std::abs(mean) > 1e-12 * std::max(1.0, scale))
    throw InvalidArgument("custom law: table must have mean zero");
  InnovationLaw law(Kind::Custom);
  law.values_ = std::move(values);
  law.probs_ = std::move(probs);
  law.cumulative_.resize(law.probs_.size());
  std::partial_sum(law.probs_.begin(), law.probs_.end(), law.cumulative_.begin());
  law.cumulative_.back() = 1.0;
  return law;
}

double InnovationLaw::raw_moment(int k) const noexcept {
  if (k == 0) return 1.0;
  if (k == 1) return 0.0;
  switch (kind_) {
    case Kind::Rademacher:
      return (k % 2 == 0) ? 1.0 : 0.0;
    case Kind::StandardNormal:
      return k == 2 ? 1.0 : k == 3 ? 0.0 : 3.0;
    case Kind::CenteredExponential: {
      // central moments of Exp(1): 1, 2, 9; scale by rate^-k
      const double m = k == 2 ? 1.0 : k == 3 ? 2.0 : 9.0;
      return m / std::pow(rate_, k);
    }
    case Kind::Uniform:
      return k == 2 ? 1.0 / 12.0 : k == 3 ? 0.0 : 1.0 / 80.0;
    case Kind::Custom: {
      double m = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) m += std::pow(values_[i], k) * probs_[i];
      return m;
    }
  }
  return 0.0;
}

bool InnovationLaw::symmetric() const noexcept {
  switch (kind_) {
    case Kind::Rademacher:
    case Kind::StandardNormal:
    case Kind::Uniform:
      return true;
    case Kind::CenteredExponential:
      return false;
    case Kind::Custom: {
      for (std::size_t i = 0; i < values_.size(); ++i) {
        double mirrored = 0.0;
        for (std::size_t j = 0; j < values_.size(); ++j)
          if (values_[j] == -values_[i]) mirrored += probs_[j];
        if (std::abs(mirrored - probs_[i]) > 1e-14) return false;
      }
      return true;
    }
  }
  return false;
}

std::complex<double> InnovationLaw::cf(double t) const noexcept {
  using namespace std::complex_literals;
  switch (kind_) {
    case Kind::Rademacher:
      return std::cos(t);
    case Kind::StandardNormal:
      return std::exp(-0.5 * t * t);
    case Kind::CenteredExponential: {
      const double u = t / rate_;
      return std::exp(-1i * u) / (1.0 - 1i * u);
    }
    case Kind::Uniform:
      return t == 0.0 ? 1.0 : std::sin(0.5 * t) / (0.5 * t);
    case Kind::Custom: {
      std::complex<double> s = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) s += probs_[i] * std::exp(1i * t * values_[i]);
      return s;
    }
  }
  return 1.0;
}

double InnovationLaw::from_block(const Philox4x32::Counter& block) const noexcept {
  const double u1 = to_open_unit(lo_word(block));
  switch (kind_) {
    case Kind::Rademacher:
      return (block[0] & 1u) ? 1.0 : -1.0;
    case Kind::StandardNormal: {
      const double u2 = to_open_unit(hi_word(block));
      return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    case Kind::CenteredExponential:
      return (-std::log(u1) - 1.0) / rate_;
    case Kind::Uniform:
      return u1 - 0.5;
    case Kind::Custom: {
      const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u1);
      const auto idx = std::min<std::size_t>(it - cumulative_.begin(), values_.size() - 1);
      return values_[idx];
    }
  }
  return 0.0;
}

double InnovationLaw::sample(Rng& rng) const noexcept {
  Philox4x32::Counter block;
  const std::uint64_t a = rng.next_u64();
  const std::uint64_t b = rng.next_u64();
  block = {static_cast<std::uint32_t>(a >> 32), static_cast<std::uint32_t>(a),
           static_cast<std::uint32_t>(b >> 32), static_cast<std::uint32_t>(b)};
  return from_block(block);
}

std::string InnovationLaw::name() const {
  switch (kind_) {
    case Kind::Rademacher:
      return "rademacher";
    case Kind::StandardNormal:
      return "normal";
    case Kind::CenteredExponential:
      return "exponential";
    case Kind::Uniform:
      return "uniform";
    case Kind::Custom:
      return "custom";
  }
  return "unknown";
}

InnovationLaw InnovationLaw::from_name(const std::string& name, double rate) {
  if (name == "rademacher") return rademacher();
  if (name == "normal") return standard_normal();
  if (name == "exponential") return centered_exponential(rate);
  if (name == "uniform") return uniform();
  throw InvalidArgument("unknown innovation law '" + name + "'");
}

InnovationStream::InnovationStream(std::uint64_t seed, std::uint64_t stream_id, InnovationLaw law)
    : seed_(seed), stream_id_(stream_id), law_(std::move(law)), engine_(mix64(seed, stream_id)) {}

double InnovationStream::value(std::uint64_t index) const noexcept {
  if (law_.kind() == InnovationLaw::Kind::Rademacher) {
    const auto block = engine_.block(index >> 7, lane_);
    const unsigned bit = static_cast<unsigned>(index & 127u);
    return ((block[bit >> 5] >> (bit & 31u)) & 1u) ? 1.0 : -1.0;
  }
  return law_.from_block(engine_.block(index, lane_));
}

void InnovationStream::fill(std::uint64_t first_index, std::span<double> out) const noexcept {
  if (law_.kind() != InnovationLaw::Kind::Rademacher) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = law_.from_block(engine_.block(first_index + i, lane_));
    return;
  }
  std::size_t i = 0;
  while (i < out.size()) {
    const std::uint64_t index = first_index + i;
    const auto block = engine_.block(index >> 7, lane_);
    unsigned bit = static_cast<unsigned>(index & 127u);
    for (; bit < 128 && i < out.size(); ++bit, ++i)
      out[i] = ((block[bit >> 5] >> (bit & 31u)) & 1u) ? 1.0 : -1.0;
  }
}

double InnovationStream::sum(std::uint64_t first_index, std::uint64_t count) const noexcept {
  if (law_.kind() != InnovationLaw::Kind::Rademacher) {
    double s = 0.0;
    for (std::uint64_t i = 0; i < count; ++i) s += law_.from_block(engine_.block(first_index + i, lane_));
    return s;
  }
  std::int64_t ones = 0;
  std::uint64_t index = first_index;
  const std::uint64_t end = first_index + count;
  while (index < end) {
    const auto block = engine_.block(index >> 7, lane_);
    const unsigned lo = static_cast<unsigned>(index & 127u);
    const unsigned hi = static_cast<unsigned>(std::min<std::uint64_t>(128u, lo + (end - index)));
    for (unsigned w = 0; w < 4; ++w) {
      const unsigned wlo = std::max(lo, w * 32u), whi = std::min(hi, w * 32u + 32u);
      if (wlo >= whi) continue;
      const unsigned width = whi - wlo;
      const std::uint32_t mask = width == 32u ? 0xFFFFFFFFu : (((1u << width) - 1u) << (wlo - w * 32u));
      ones += std::popcount(block[w] & mask);
    }
    index += hi - lo;
  }
  return static_cast<double>(2 * ones - static_cast<std::int64_t>(count));
}

InnovationStream InnovationStream::substream(std::uint64_t j) const {
  return InnovationStream(seed_, mix64(stream_id_, j + 1), law_);
}

InnovationStream InnovationStream::with_law(InnovationLaw law) const {
  InnovationStream out(seed_, stream_id_, std::move(law));
  out.lane_ = lane_;
  return out;
}

InnovationStream InnovationStream::lane(std::uint32_t lane) const {
  InnovationStream out = *this;
  out.lane_ = lane;
  return out;
}

std::string InnovationStream::fingerprint() const {
  std::ostringstream os;
  os << std::hex << seed_ << ':' << stream_id_ << ':' << law_.name();
  if (law_.kind() == InnovationLaw::Kind::CenteredExponential) os << '(' << law_.rate() << ')';
  return os.str();
}

std::vector<double> gen_innovations(const InnovationStream& stream, std::size_t count) {
  if (count == 0) throw InvalidArgument("gen_innovations: count must be positive");
  std::vector<double> out(count);
  stream.fill(0, out);
  return out;
}

}  // namespace edgelab
