#pragma once

// Flat key-value run manifest: one "key = value" per line, '#' starts a comment.
// Keys keep insertion order; reals are written in shortest round-trip form.

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <stdexcept>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tvis/grid.hpp"

namespace tvis {

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Manifest {
public:
  void set(const std::string& key, std::string value) {
    if (key.empty() || key.find_first_of("=\n#") != std::string::npos || key.front() == ' ' ||
        key.back() == ' ')
      throw std::invalid_argument("manifest: invalid key '" + key + "'");
    if (value.find('\n') != std::string::npos)
      throw std::invalid_argument("manifest: value for '" + key + "' spans lines");
    for (auto& [k, v] : entries_) {
      if (k == key) {
        v = std::move(value);
        return;
      }
    }
    entries_.emplace_back(key, std::move(value));
  }
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value) { set(key, format_real(value)); }
  void set(const std::string& key, std::size_t value) { set(key, std::to_string(value)); }
  void set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

  std::optional<std::string> get(const std::string& key) const {
    for (const auto& [k, v] : entries_)
      if (k == key) return v;
    return std::nullopt;
  }

  std::string at(const std::string& key) const {
    if (auto v = get(key)) return *v;
    throw std::out_of_range("manifest: missing key '" + key + "'");
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  void write(std::ostream& out) const {
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
  }

  static Manifest parse(std::istream& in) {
    Manifest m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw IoError("manifest: line " + std::to_string(lineno) + " has no '='");
      m.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return m;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    write(out);
    if (!out) throw IoError("write failed for '" + path + "'");
  }

  static Manifest load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse(in);
  }

private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace tvis
