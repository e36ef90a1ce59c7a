#include <set>
#include <sstream>

#include "edgelab/error.hpp"
#include "edgelab/flat_toml.hpp"
#include "edgelab/process.hpp"
#include "json.hpp"

namespace edgelab {

namespace {

using toml::format_array;
using toml::format_double;

void write_law(std::ostringstream& os, const InnovationLaw& law) {
  os << "law = \"" << law.name() << "\"\n";
  if (law.kind() == InnovationLaw::Kind::CenteredExponential) os << "rate = " << format_double(law.rate()) << "\n";
  if (law.kind() == InnovationLaw::Kind::Custom) {
    os << "values = " << format_array(law.table_values()) << "\n";
    os << "probs = " << format_array(law.table_probs()) << "\n";
  }
}

InnovationLaw read_law(const toml::Table& t) {
  const std::string name = toml::get_string(t, "law", "normal");
  if (name == "custom")
    return InnovationLaw::custom(toml::require(t, "values").as_doubles(), toml::require(t, "probs").as_doubles());
  return InnovationLaw::from_name(name, toml::get_double(t, "rate", 1.0));
}

}  // namespace

std::string ProcessSpec::to_toml() const {
  std::ostringstream os;
  os << "family = \"" << family_name() << "\"\n";
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, IidFamily>) {
          write_law(os, f.law);
        } else if constexpr (std::is_same_v<F, LinearFamily>) {
          os << "coefficients = " << format_array(f.coefficients) << "\n";
          write_law(os, f.law);
        } else if constexpr (std::is_same_v<F, GarchFamily>) {
          os << "mu = " << format_double(f.mu) << "\n";
          os << "alpha = " << format_array(f.alpha) << "\n";
          os << "beta = " << format_array(f.beta) << "\n";
          os << "moment_q = " << format_double(f.moment_q) << "\n";
          write_law(os, f.law);
        } else if constexpr (std::is_same_v<F, IteratedMapFamily>) {
          os << "map = \""
             << (f.map == IteratedMapFamily::Map::RandomCoefficient ? "random_coefficient" : "tanh_ar") << "\"\n";
          os << "rho = " << format_double(f.rho) << "\n";
          os << "gamma = " << format_double(f.gamma) << "\n";
          write_law(os, f.law);
        } else if constexpr (std::is_same_v<F, DoublingFamily>) {
          os << "digits = " << f.digits << "\n";
        } else {
          os << "a = " << format_double(f.a) << "\n";
          os << "b = " << f.b << "\n";
        }
      },
      family_);
  os << "burn_in = " << burn_in_ << "\n";
  os << "truncation_depth = " << truncation_depth_ << "\n";
  os << "approximate = " << (approximate_ ? "true" : "false") << "\n";
  return os.str();
}

ProcessSpec ProcessSpec::from_table(const toml::Table& t) {
  static const std::set<std::string> known = {"family", "law",   "rate",     "values", "probs",
                                              "coefficients", "mu", "alpha", "beta",   "moment_q",
                                              "map",    "rho",   "gamma",    "digits", "a",
                                              "b",      "burn_in", "truncation_depth", "approximate"};
  for (const auto& [key, value] : t)
    if (!known.count(key)) throw InvalidArgument("process spec: unknown key '" + key + "'");
  const std::string family = toml::require(t, "family").as_string();
  Family f;
  if (family == "iid") {
    f = IidFamily{read_law(t)};
  } else if (family == "linear") {
    f = LinearFamily{toml::require(t, "coefficients").as_doubles(), read_law(t)};
  } else if (family == "garch") {
    GarchFamily g;
    g.mu = toml::get_double(t, "mu", 1.0);
    if (t.count("alpha")) g.alpha = t.at("alpha").as_doubles();
    if (t.count("beta")) g.beta = t.at("beta").as_doubles();
    g.moment_q = toml::get_double(t, "moment_q", 4.0);
    g.law = read_law(t);
    f = g;
  } else if (family == "iterated_map") {
    IteratedMapFamily m;
    const std::string map = toml::get_string(t, "map", "random_coefficient");
    if (map == "random_coefficient")
      m.map = IteratedMapFamily::Map::RandomCoefficient;
    else if (map == "tanh_ar")
      m.map = IteratedMapFamily::Map::TanhAr;
    else
      throw InvalidArgument("process spec: unknown map '" + map + "'");
    m.rho = toml::get_double(t, "rho", 0.5);
    m.gamma = toml::get_double(t, "gamma", 0.0);
    m.law = read_law(t);
    f = m;
  } else if (family == "doubling") {
    f = DoublingFamily{static_cast<int>(toml::get_int(t, "digits", 16))};
  } else if (family == "example1") {
    const Example1Family d = example1_defaults();
    f = Example1Family{toml::get_double(t, "a", d.a), static_cast<int>(toml::get_int(t, "b", d.b))};
  } else {
    throw InvalidArgument("process spec: unknown family '" + family + "'");
  }
  ProcessSpec spec(std::move(f), toml::get_int(t, "burn_in", -1));
  const long depth = toml::get_int(t, "truncation_depth", 0);
  if (depth > 0) {
    const ProcessSpec truncated = truncate_mdep(spec, depth);
    if (t.count("approximate") && toml::get_bool(t, "approximate", false) != truncated.approximate())
      throw InvalidArgument("process spec: 'approximate' flag disagrees with the family");
    return truncated;
  }
  return spec;
}

ProcessSpec ProcessSpec::from_toml(const std::string& text) {
  const toml::Document doc = toml::parse(text);
  if (const auto* process = doc.section("process")) return from_table(*process);
  return from_table(doc.root());
}

std::string SampleSet::to_csv() const {
  std::string out = "replicate,sum\n";
  char buf[64];
  for (std::size_t j = 0; j < sums.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", j, sums[j]);
    out += buf;
  }
  return out;
}

std::string SampleSet::sidecar_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["M"] = sums.size();
  j["seed"] = seed;
  j["spec_fingerprint"] = spec_fingerprint;
  j["stream_fingerprint"] = stream_fingerprint;
  return j.dump(2) + "\n";
}

SampleSet SampleSet::from_csv(const std::string& csv, const std::string& sidecar) {
  SampleSet s;
  const auto j = nlohmann::json::parse(sidecar);
  s.n = j.at("n").get<long>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.spec_fingerprint = j.at("spec_fingerprint").get<std::string>();
  s.stream_fingerprint = j.at("stream_fingerprint").get<std::string>();
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line.rfind("replicate,sum", 0) != 0)
    throw InvalidArgument("sample csv: missing 'replicate,sum' header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidArgument("sample csv: malformed row '" + line + "'");
    const std::size_t idx = std::stoull(line.substr(0, comma));
    if (idx != s.sums.size()) throw InvalidArgument("sample csv: replicate indices must be consecutive");
    s.sums.push_back(std::stod(line.substr(comma + 1)));
  }
  if (s.sums.size() != j.at("M").get<std::size_t>()) throw InvalidArgument("sample csv: row count disagrees with M");
  return s;
}

}  // namespace edgelab
