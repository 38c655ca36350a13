#pragma once

// Config ingestion, run manifests and CSV output.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperdyn/errors.hpp"
#include "hyperdyn/schottky.hpp"

namespace hyperdyn {

inline constexpr const char* kToolVersion = "0.1.0";

struct ConfigDefaults {
  int depth = 6;
  double delta_tol = 1e-10;
  std::size_t cylinder_cap = 5'000'000;
  std::uint64_t seed = 0;
  int max_word_length = 10;
  int iters = 200;
};

struct Config {
  std::vector<GeneratorSpec> generators;
  ConfigDefaults defaults;
  nlohmann::json canonical;  ///< parsed document, keys sorted
};

namespace detail {

inline double number_at(const nlohmann::json& node, const std::string& path) {
  if (!node.is_number()) throw ConfigError(path + ": expected a number");
  return node.get<double>();
}

inline const nlohmann::json& member(const nlohmann::json& node, const char* key, const std::string& path) {
  if (!node.is_object()) throw ConfigError(path + ": expected an object");
  const auto it = node.find(key);
  if (it == node.end()) throw ConfigError(path + "." + key + ": missing");
  return *it;
}

inline Disk disk_at(const nlohmann::json& node, const std::string& path) {
  const nlohmann::json& center = member(node, "center", path);
  if (!center.is_array() || center.size() != 2) throw ConfigError(path + ".center: expected [re, im]");
  Disk d;
  d.center = {number_at(center[0], path + ".center[0]"), number_at(center[1], path + ".center[1]")};
  d.radius = number_at(member(node, "radius", path), path + ".radius");
  return d;
}

// 1-based line of a byte offset.
inline std::size_t line_of(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace detail

/// Parses a JSON config. Syntax errors name the line; schema errors name the
/// field path (e.g. "generators[1].target.radius").
inline Config parse_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config line " + std::to_string(detail::line_of(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  Config cfg;
  cfg.canonical = doc;
  const nlohmann::json& gens = detail::member(doc, "generators", "config");
  if (!gens.is_array() || gens.empty()) throw ConfigError("generators: expected a non-empty array");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string path = "generators[" + std::to_string(i) + "]";
    GeneratorSpec spec;
    spec.source = detail::disk_at(detail::member(gens[i], "source", path), path + ".source");
    spec.target = detail::disk_at(detail::member(gens[i], "target", path), path + ".target");
    const auto tw = gens[i].find("twist");
    spec.twist = tw == gens[i].end() ? 0.0 : detail::number_at(*tw, path + ".twist");
    cfg.generators.push_back(spec);
  }
  if (const auto it = doc.find("defaults"); it != doc.end()) {
    const nlohmann::json& d = *it;
    if (!d.is_object()) throw ConfigError("defaults: expected an object");
    auto integer = [&](const char* key, auto& out) {
      if (const auto f = d.find(key); f != d.end()) {
        if (!f->is_number_integer() || f->get<long long>() < 0) {
          throw ConfigError(std::string("defaults.") + key + ": expected a non-negative integer");
        }
        out = static_cast<std::remove_reference_t<decltype(out)>>(f->get<long long>());
      }
    };
    integer("depth", cfg.defaults.depth);
    integer("cylinder_cap", cfg.defaults.cylinder_cap);
    integer("seed", cfg.defaults.seed);
    integer("max_word_length", cfg.defaults.max_word_length);
    integer("iters", cfg.defaults.iters);
    if (const auto f = d.find("delta_tol"); f != d.end()) {
      cfg.defaults.delta_tol = detail::number_at(*f, "defaults.delta_tol");
      if (!(cfg.defaults.delta_tol > 0.0)) throw ConfigError("defaults.delta_tol: must be positive");
    }
  }
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

/// FNV-1a 64 of the canonical (key-sorted, compact) config JSON, in hex.
inline std::string config_digest(const Config& cfg) {
  const std::string text = cfg.canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

/// 17 significant digits.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  CsvWriter& row() {
    rows_.emplace_back();
    return *this;
  }
  CsvWriter& add(double x) {
    rows_.back().push_back(format_double(x));
    return *this;
  }
  CsvWriter& add(long long x) {
    rows_.back().push_back(std::to_string(x));
    return *this;
  }
  CsvWriter& add(int x) { return add(static_cast<long long>(x)); }
  CsvWriter& add(std::size_t x) { return add(static_cast<long long>(x)); }
  CsvWriter& add(bool x) {
    rows_.back().push_back(x ? "1" : "0");
    return *this;
  }
  CsvWriter& add(const std::string& s) {
    rows_.back().push_back(s);
    return *this;
  }

  std::string str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace hyperdyn
