#include "edgelab/flat_toml.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace edgelab::toml {

namespace {

class LineParser {
 public:
  LineParser(std::string_view text, int line) : s_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

  std::string key() {
    skip_ws();
    if (peek() == '"') return quoted();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                s_[pos_] == '-' || s_[pos_] == '.'))
      ++pos_;
    if (start == pos_) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string quoted() {
    expect('"');
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\' && pos_ < s_.size()) {
        const char e = s_[pos_++];
        c = e == 'n' ? '\n' : e == 't' ? '\t' : e;
      }
      out.push_back(c);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  Value value() {
    skip_ws();
    const char c = peek();
    if (c == '"') return Value{quoted()};
    if (c == '[') {
      ++pos_;
      Array arr;
      skip_ws();
      if (peek() == ']') {
        ++pos_;
        return Value{arr};
      }
      for (;;) {
        arr.push_back(value());
        skip_ws();
        if (peek() == ',') {
          ++pos_;
          skip_ws();
          if (peek() == ']') {
            ++pos_;
            break;
          }
          continue;
        }
        if (peek() == ']') {
          ++pos_;
          break;
        }
        fail("expected ',' or ']' in array");
      }
      return Value{arr};
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' && s_[pos_] != ' ' &&
           s_[pos_] != '\t')
      ++pos_;
    std::string tok(s_.substr(start, pos_ - start));
    if (tok.empty()) fail("expected a value");
    if (tok == "true") return Value{true};
    if (tok == "false") return Value{false};
    std::string clean;
    for (char ch : tok)
      if (ch != '_') clean.push_back(ch);
    const bool is_float = clean.find_first_of(".eE") != std::string::npos || clean == "inf" ||
                          clean == "+inf" || clean == "-inf" || clean == "nan";
    if (!is_float) {
      std::int64_t v = 0;
      const char* b = clean.data();
      if (*b == '+') ++b;
      auto [p, ec] = std::from_chars(b, clean.data() + clean.size(), v);
      if (ec != std::errc() || p != clean.data() + clean.size()) fail("invalid value '" + tok + "'");
      return Value{v};
    }
    char* end = nullptr;
    const double d = std::strtod(clean.c_str(), &end);
    if (end != clean.c_str() + clean.size()) fail("invalid number '" + tok + "'");
    return Value{d};
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

}  // namespace

double Value::as_double() const {
  if (const auto* d = std::get_if<double>(&data)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&data)) return static_cast<double>(*i);
  throw std::invalid_argument("expected a number");
}

std::int64_t Value::as_int() const {
  if (const auto* i = std::get_if<std::int64_t>(&data)) return *i;
  if (const auto* d = std::get_if<double>(&data); d && std::floor(*d) == *d) return static_cast<std::int64_t>(*d);
  throw std::invalid_argument("expected an integer");
}

bool Value::as_bool() const {
  if (const auto* b = std::get_if<bool>(&data)) return *b;
  throw std::invalid_argument("expected a boolean");
}

const std::string& Value::as_string() const {
  if (const auto* s = std::get_if<std::string>(&data)) return *s;
  throw std::invalid_argument("expected a string");
}

const Array& Value::as_array() const {
  if (const auto* a = std::get_if<Array>(&data)) return *a;
  throw std::invalid_argument("expected an array");
}

std::vector<double> Value::as_doubles() const {
  std::vector<double> out;
  for (const auto& v : as_array()) out.push_back(v.as_double());
  return out;
}

std::vector<std::int64_t> Value::as_ints() const {
  std::vector<std::int64_t> out;
  for (const auto& v : as_array()) out.push_back(v.as_int());
  return out;
}

const Table& Document::root() const {
  static const Table empty;
  const auto it = sections.find("");
  return it == sections.end() ? empty : it->second;
}

const Table* Document::section(const std::string& name) const {
  const auto it = sections.find(name);
  return it == sections.end() ? nullptr : &it->second;
}

Document parse(const std::string& text) {
  Document doc;
  doc.sections[""];
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    LineParser p(raw, line);
    if (p.at_end_or_comment()) continue;
    if (p.peek() == '[') {
      p.expect('[');
      current = p.key();
      p.expect(']');
      if (!p.at_end_or_comment()) p.fail("trailing characters after section header");
      if (doc.sections.count(current) && !doc.sections[current].empty()) p.fail("duplicate section '" + current + "'");
      doc.sections[current];
      continue;
    }
    const std::string k = p.key();
    p.expect('=');
    Value v = p.value();
    if (!p.at_end_or_comment()) p.fail("trailing characters after value");
    auto& table = doc.sections[current];
    if (table.count(k)) p.fail("duplicate key '" + k + "'");
    table.emplace(k, std::move(v));
  }
  return doc;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string format_array(const std::vector<double>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += format_double(xs[i]);
  }
  return s + "]";
}

const Value& require(const Table& t, const std::string& key) {
  const auto it = t.find(key);
  if (it == t.end()) throw std::invalid_argument("missing key '" + key + "'");
  return it->second;
}

double get_double(const Table& t, const std::string& key, double fallback) {
  const auto it = t.find(key);
  return it == t.end() ? fallback : it->second.as_double();
}

std::int64_t get_int(const Table& t, const std::string& key, std::int64_t fallback) {
  const auto it = t.find(key);
  return it == t.end() ? fallback : it->second.as_int();
}

std::string get_string(const Table& t, const std::string& key, const std::string& fallback) {
  const auto it = t.find(key);
  return it == t.end() ? fallback : it->second.as_string();
}

bool get_bool(const Table& t, const std::string& key, bool fallback) {
  const auto it = t.find(key);
  return it == t.end() ? fallback : it->second.as_bool();
}

}  // namespace edgelab::toml
