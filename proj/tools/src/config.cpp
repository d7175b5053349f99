#include "config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace orbistab::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a])) ++a;
  while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
  return s.substr(a, b - a);
}

}  // namespace

const std::string* Config::find(const std::string& section,
                                const std::string& key) const {
  const std::string* hit = nullptr;
  for (const auto& sec : sections) {
    if (sec.name != section) continue;
    for (const auto& e : sec.entries)
      if (e.key == key) hit = &e.value;
  }
  return hit;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

void Config::set(const std::string& section, const std::string& key,
                 std::string value) {
  Section* last_sec = nullptr;
  Entry* last_entry = nullptr;
  for (auto& sec : sections) {
    if (sec.name != section) continue;
    last_sec = &sec;
    for (auto& e : sec.entries)
      if (e.key == key) last_entry = &e;
  }
  if (last_entry) {
    last_entry->value = std::move(value);
    return;
  }
  if (!last_sec) {
    sections.push_back({section, {}});
    last_sec = &sections.back();
  }
  last_sec->entries.push_back({key, std::move(value)});
}

Config parse_config(std::istream& in, const std::string& source) {
  Config cfg;
  std::string line;
  int lineno = 0;
  // keys before any header land in the unnamed section
  cfg.sections.push_back({"", {}});
  bool unnamed_used = false;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;

    if (t.front() == '[') {
      if (t.back() != ']') {
        std::ostringstream os;
        os << source << ":" << lineno << ": unterminated section header";
        throw ConfigError(os.str());
      }
      cfg.sections.push_back({trim(t.substr(1, t.size() - 2)), {}});
      continue;
    }

    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << source << ":" << lineno << ": expected key = value, got \"" << t
         << "\"";
      throw ConfigError(os.str());
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) {
      std::ostringstream os;
      os << source << ":" << lineno << ": empty key";
      throw ConfigError(os.str());
    }
    cfg.sections.back().entries.push_back({key, trim(t.substr(eq + 1))});
    if (cfg.sections.size() == 1) unnamed_used = true;
  }
  if (!unnamed_used) cfg.sections.erase(cfg.sections.begin());
  return cfg;
}

Config parse_config_text(const std::string& text, const std::string& source) {
  std::istringstream is(text);
  return parse_config(is, source);
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in, path);
}

std::string serialize_config(const Config& c) {
  std::ostringstream os;
  bool first = true;
  for (const auto& sec : c.sections) {
    if (!first) os << "\n";
    first = false;
    if (!sec.name.empty()) os << "[" << sec.name << "]\n";
    for (const auto& e : sec.entries) os << e.key << " = " << e.value << "\n";
  }
  return os.str();
}

void write_config_file(const Config& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << serialize_config(c);
}

std::string get_string(const Config& c, const std::string& sec,
                       const std::string& key) {
  const std::string* v = c.find(sec, key);
  if (!v) throw ConfigError("missing config key [" + sec + "] " + key);
  return *v;
}

std::string get_string(const Config& c, const std::string& sec,
                       const std::string& key, const std::string& fallback) {
  const std::string* v = c.find(sec, key);
  return v ? *v : fallback;
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0')
    throw ConfigError(what + ": cannot parse number \"" + text + "\"");
  return v;
}

std::vector<double> parse_doubles(const std::string& text,
                                  const std::string& what) {
  std::string norm = text;
  for (char& ch : norm)
    if (ch == ',') ch = ' ';
  std::istringstream is(norm);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(parse_double(tok, what));
  return out;
}

double get_double(const Config& c, const std::string& sec,
                  const std::string& key) {
  return parse_double(get_string(c, sec, key), "[" + sec + "] " + key);
}

double get_double(const Config& c, const std::string& sec,
                  const std::string& key, double fallback) {
  const std::string* v = c.find(sec, key);
  return v ? parse_double(*v, "[" + sec + "] " + key) : fallback;
}

int get_int(const Config& c, const std::string& sec, const std::string& key,
            int fallback) {
  const std::string* v = c.find(sec, key);
  if (!v) return fallback;
  const double d = parse_double(*v, "[" + sec + "] " + key);
  const int i = (int)d;
  if ((double)i != d)
    throw ConfigError("[" + sec + "] " + key + ": expected an integer, got \"" +
                      *v + "\"");
  return i;
}

bool get_bool(const Config& c, const std::string& sec, const std::string& key,
              bool fallback) {
  const std::string* v = c.find(sec, key);
  if (!v) return fallback;
  std::string t = trim(*v);
  for (char& ch : t) ch = (char)std::tolower((unsigned char)ch);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError("[" + sec + "] " + key + ": expected a boolean, got \"" +
                    *v + "\"");
}

std::vector<double> get_doubles(const Config& c, const std::string& sec,
                                const std::string& key) {
  return parse_doubles(get_string(c, sec, key), "[" + sec + "] " + key);
}

}  // namespace orbistab::cli
