#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

/// Reader/writer for the TOML subset used by spec and config files:
/// `[section]` headers, `key = value` pairs, strings, integers, floats,
/// booleans, and single-line arrays of those. No inline tables or
/// multi-line strings.
namespace edgelab::toml {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<bool, std::int64_t, double, std::string, Array> data;

  bool is_number() const noexcept {
    return std::holds_alternative<std::int64_t>(data) || std::holds_alternative<double>(data);
  }
  double as_double() const;
  std::int64_t as_int() const;
  bool as_bool() const;
  const std::string& as_string() const;
  const Array& as_array() const;
  std::vector<double> as_doubles() const;
  std::vector<std::int64_t> as_ints() const;
};

using Table = std::map<std::string, Value>;

struct Document {
  /// "" holds the keys before the first header.
  std::map<std::string, Table> sections;

  const Table& root() const;
  const Table* section(const std::string& name) const;
};

Document parse(const std::string& text);

/// Shortest round-tripping representation that still reads back as a float.
std::string format_double(double x);
std::string format_array(const std::vector<double>& xs);

/// Typed lookups with a descriptive error on missing keys or wrong types.
const Value& require(const Table& t, const std::string& key);
double get_double(const Table& t, const std::string& key, double fallback);
std::int64_t get_int(const Table& t, const std::string& key, std::int64_t fallback);
std::string get_string(const Table& t, const std::string& key, const std::string& fallback);
bool get_bool(const Table& t, const std::string& key, bool fallback);

}  // namespace edgelab::toml
