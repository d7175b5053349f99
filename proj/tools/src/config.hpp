#pragma once

#include <orbistab/types.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace orbistab::cli {

/// Flat key = value file grouped by [section] headers. Comments are
/// full-line only ('#' or ';' as the first non-blank character); values are
/// kept verbatim, so they may contain spaces (vectors, expressions).
/// Section and key order is preserved, and duplicate keys are allowed with
/// last-one-wins lookup.
struct Config {
  struct Entry {
    std::string key;
    std::string value;
  };
  struct Section {
    std::string name;
    std::vector<Entry> entries;
  };
  std::vector<Section> sections;

  /// Last value set for section/key, or nullptr.
  const std::string* find(const std::string& section,
                          const std::string& key) const;
  bool has(const std::string& section, const std::string& key) const;
  /// Overwrites the last occurrence or appends (creating the section).
  void set(const std::string& section, const std::string& key,
           std::string value);
};

Config parse_config(std::istream& in, const std::string& source = "<config>");
Config parse_config_text(const std::string& text,
                         const std::string& source = "<config>");
Config parse_config_file(const std::string& path);

/// Canonical text form; parse(serialize(c)) reproduces c exactly.
std::string serialize_config(const Config& c);
void write_config_file(const Config& c, const std::string& path);

// Typed readers. The required forms throw ConfigError naming the missing
// key; the defaulted forms fall back silently.
std::string get_string(const Config& c, const std::string& sec,
                       const std::string& key);
std::string get_string(const Config& c, const std::string& sec,
                       const std::string& key, const std::string& fallback);
double get_double(const Config& c, const std::string& sec,
                  const std::string& key);
double get_double(const Config& c, const std::string& sec,
                  const std::string& key, double fallback);
int get_int(const Config& c, const std::string& sec, const std::string& key,
            int fallback);
bool get_bool(const Config& c, const std::string& sec, const std::string& key,
              bool fallback);
/// Whitespace- or comma-separated list of numbers.
std::vector<double> get_doubles(const Config& c, const std::string& sec,
                                const std::string& key);

double parse_double(const std::string& text, const std::string& what);
std::vector<double> parse_doubles(const std::string& text,
                                  const std::string& what);

}  // namespace orbistab::cli
