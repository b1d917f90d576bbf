#include "driftlab/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace driftlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string current;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty())
        throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      bool seen = false;
      for (const auto& s : cfg.sections_) seen = seen || s.name == current;
      if (!seen) cfg.sections_.push_back({current, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (current.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
    cfg.set(current, key, value);
  }
  return cfg;
}

std::string Config::serialize() const {
  std::ostringstream out;
  for (const auto& s : sections_) {
    out << '[' << s.name << "]\n";
    for (const auto& [k, v] : s.entries) out << k << " = " << v << '\n';
  }
  return out.str();
}

std::uint64_t Config::hash() const { return fnv1a(serialize()); }

const std::string* Config::find(const std::string& section, const std::string& key) const {
  for (const auto& s : sections_) {
    if (s.name != section) continue;
    for (const auto& [k, v] : s.entries)
      if (k == key) return &v;
  }
  return nullptr;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  const std::string* v = find(section, key);
  return v ? *v : fallback;
}

double Config::get_real(const std::string& section, const std::string& key,
                        double fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const double d = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("trailing text");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key " + section + "." + key + ": not a real number: " + *v);
  }
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const int i = std::stoi(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("trailing text");
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config key " + section + "." + key + ": not an integer: " + *v);
  }
}

std::vector<double> Config::get_real_list(const std::string& section, const std::string& key,
                                          const std::vector<double>& fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& part : split(*v, ',')) {
    if (part.empty()) continue;
    try {
      out.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw ConfigError("config key " + section + "." + key + ": bad list entry: " + part);
    }
  }
  return out;
}

std::vector<int> Config::get_int_list(const std::string& section, const std::string& key,
                                      const std::vector<int>& fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  std::vector<int> out;
  for (const auto& part : split(*v, ',')) {
    if (part.empty()) continue;
    try {
      out.push_back(std::stoi(part));
    } catch (const std::exception&) {
      throw ConfigError("config key " + section + "." + key + ": bad list entry: " + part);
    }
  }
  return out;
}

std::vector<std::string> Config::get_expr_list(const std::string& section, const std::string& key,
                                               const std::vector<std::string>& fallback) const {
  const std::string* v = find(section, key);
  if (!v) return fallback;
  std::vector<std::string> out;
  for (const auto& part : split(*v, ';'))
    if (!part.empty()) out.push_back(part);
  return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  for (auto& s : sections_) {
    if (s.name != section) continue;
    for (auto& [k, v] : s.entries) {
      if (k == key) {
        v = value;
        return;
      }
    }
    s.entries.emplace_back(key, value);
    return;
  }
  sections_.push_back({section, {{key, value}}});
}

void Config::require_known(const std::string& section,
                           const std::vector<std::string>& allowed) const {
  std::string bad;
  for (const auto& s : sections_) {
    if (s.name != section) continue;
    for (const auto& [k, v] : s.entries) {
      bool ok = false;
      for (const auto& a : allowed) ok = ok || a == k;
      if (!ok) bad += (bad.empty() ? "" : ", ") + section + "." + k;
    }
  }
  if (!bad.empty()) throw ConfigError("unknown config key(s): " + bad);
}

void Config::require_sections(const std::vector<std::string>& allowed) const {
  std::string bad;
  for (const auto& s : sections_) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == s.name;
    if (!ok) bad += (bad.empty() ? "" : ", ") + s.name;
  }
  if (!bad.empty()) throw ConfigError("unknown config section(s): " + bad);
}

bool Config::operator==(const Config& other) const {
  if (sections_.size() != other.sections_.size()) return false;
  for (std::size_t i = 0; i < sections_.size(); ++i) {
    if (sections_[i].name != other.sections_[i].name) return false;
    if (sections_[i].entries != other.sections_[i].entries) return false;
  }
  return true;
}

}  // namespace driftlab
