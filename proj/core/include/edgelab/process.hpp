#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "edgelab/flat_toml.hpp"
#include "edgelab/innovations.hpp"
#include "edgelab/laws.hpp"

namespace edgelab {

/// X_k = eps_k.
struct IidFamily {
  InnovationLaw law = InnovationLaw::standard_normal();
};

/// X_k = sum_i a_i eps_{k-i}, i = 0..L.
struct LinearFamily {
  std::vector<double> coefficients;
  InnovationLaw law = InnovationLaw::standard_normal();
};

/// Y_k = eps_k V_k,  V_k^2 = mu + sum_i alpha_i V_{k-i}^2 + sum_j beta_j Y_{k-j}^2;  X_k = Y_k.
struct GarchFamily {
  double mu = 1.0;
  std::vector<double> alpha;
  std::vector<double> beta;
  InnovationLaw law = InnovationLaw::standard_normal();
  /// Moment order q in the contraction check sum ||alpha_i + beta_i eps^2||_{q/2} < 1.
  double moment_q = 4.0;
};

/// Y_k = F(Y_{k-1}, eps_k); X_k = Y_k.
struct IteratedMapFamily {
  enum class Map {
    /// F(y, e) = (rho + gamma e) y + e
    RandomCoefficient,
    /// F(y, e) = rho tanh(y) + e; symmetric laws only
    TanhAr,
  };
  Map map = Map::RandomCoefficient;
  double rho = 0.5;
  double gamma = 0.0;
  InnovationLaw law = InnovationLaw::standard_normal();
};

/// Centered binary digit expansion of the doubling map: Linear with
/// a_i = 2^{-i-1}, i < digits, Rademacher innovations.
struct DoublingFamily {
  int digits = 16;
};

/// X_k = U_{k-1} + H_k - H_{k-1}: Rademacher U and smoothing-law H.
struct Example1Family {
  double a = 0.125;
  int b = 6;
};

using Family =
    std::variant<IidFamily, LinearFamily, GarchFamily, IteratedMapFamily, DoublingFamily, Example1Family>;

/// Declarative, immutable description of a stationary Bernoulli shift.
class ProcessSpec {
 public:
  /// Validates the family (stationarity, moment and symmetry requirements)
  /// and fills the default burn-in when `burn_in` < 0.
  explicit ProcessSpec(Family family, long burn_in = -1);

  const Family& family() const noexcept { return family_; }
  long burn_in() const noexcept { return burn_in_; }
  /// Memory length of the exact families (L for Linear); 0 for IID;
  /// -1 for recursions with infinite memory.
  long memory() const noexcept;
  /// Depth at which the driving recursion is truncated (0 = not truncated).
  long truncation_depth() const noexcept { return truncation_depth_; }
  /// True when the spec only approximates the m-truncated conditional mean.
  bool approximate() const noexcept { return approximate_; }
  /// Innovation law of the driving noise (Rademacher for Doubling and Example1).
  InnovationLaw law() const;
  std::string family_name() const;

  /// Linear coefficient list for Linear, Doubling and IID families.
  std::vector<double> linear_coefficients() const;
  bool is_linear() const noexcept;

  std::string fingerprint() const;
  std::string to_toml() const;
  static ProcessSpec from_toml(const std::string& text);
  /// Reads the keys of one TOML table (a `[process]`-style block).
  static ProcessSpec from_table(const toml::Table& table);

  ProcessSpec with_truncation(long depth, bool approximate) const;

 private:
  Family family_;
  long burn_in_;
  long truncation_depth_ = 0;
  bool approximate_ = false;
};

/// Contraction constant sum ||alpha_i + beta_i eps^2||_{q/2}; must be < 1.
double garch_contraction(const GarchFamily& g);

struct Path {
  std::vector<double> values;
  long n = 0;
  std::string spec_fingerprint;
  std::string stream_fingerprint;
};

/// M independent replicates of S_n / sqrt(n).
struct SampleSet {
  std::vector<double> sums;
  long n = 0;
  std::string spec_fingerprint;
  std::string stream_fingerprint;
  std::uint64_t seed = 0;

  std::size_t M() const noexcept { return sums.size(); }

  std::string to_csv() const;
  std::string sidecar_json() const;
  static SampleSet from_csv(const std::string& csv, const std::string& sidecar_json);
};

/// X_1..X_n driven by `stream` (lane 0 for eps_1.., lane 1 for the past).
Path simulate_path(const ProcessSpec& spec, const InnovationStream& stream, long n);

/// S_n/sqrt(n) for replicate j, using stream.substream(j).
double simulate_normalized_sum(const ProcessSpec& spec, const InnovationStream& replicate_stream, long n);

SampleSet simulate_sample_set(const ProcessSpec& spec, const InnovationStream& stream, long n, std::size_t M,
                              int threads = 0);

enum class Coupling {
  /// eps_0, eps_-1, ... all replaced by an independent copy (X_k^*).
  Tail,
  /// only eps_0 replaced (X_k').
  Single,
};

/// (X_k, coupled X_k) from one replicate stream; both share eps_k..eps_1.
std::pair<double, double> simulate_coupled_pair(const ProcessSpec& spec, const InnovationStream& stream, long k,
                                                Coupling coupling = Coupling::Tail);

/// Spec generating X_{k,m} = E[X_k | eps_k..eps_{k-m}] (exact for linear
/// families; truncated recursion flagged `approximate` otherwise).
ProcessSpec truncate_mdep(const ProcessSpec& spec, long m);

/// Adds (H_n - H_0)/sqrt(n) with fresh H draws from `stream` to every sum.
SampleSet smooth_diamond(const SampleSet& sample, const SmoothingLaw& law, const InnovationStream& stream);

/// Example1 components on one stream: U_0..U_{n-1} and H_0..H_n.
struct Example1Draws {
  std::vector<double> U;
  std::vector<double> H;
};
Example1Draws example1_draws(const Example1Family& family, const InnovationStream& stream, long n);

/// Default smoothing-law parameters for Example1 with a*b = c_T/2.
Example1Family example1_defaults(double c_T = 0.25, int b = 6);

}  // namespace edgelab
