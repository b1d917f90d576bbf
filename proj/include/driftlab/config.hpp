#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace driftlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat sectioned key/value configuration. Lines are `key = value` under
/// `[section]` headers; `#` starts a comment. Values keep their verbatim
/// text; typed access parses on demand. Serialization is canonical
/// (sections and keys in file order, single spaces around `=`), so
/// parse -> serialize -> parse is the identity.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  std::string serialize() const;
  /// FNV-1a of the canonical serialization.
  std::uint64_t hash() const;

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_real(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::vector<double> get_real_list(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) const;
  std::vector<int> get_int_list(const std::string& section, const std::string& key,
                                const std::vector<int>& fallback) const;
  /// Expression list: entries separated by ';'.
  std::vector<std::string> get_expr_list(const std::string& section, const std::string& key,
                                         const std::vector<std::string>& fallback) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Rejects any key in `section` that is not in `allowed`; the error
  /// message names every offending key.
  void require_known(const std::string& section, const std::vector<std::string>& allowed) const;
  /// Rejects any section not in `allowed`.
  void require_sections(const std::vector<std::string>& allowed) const;

  bool operator==(const Config& other) const;

 private:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
  };
  std::vector<Section> sections_;
  const std::string* find(const std::string& section, const std::string& key) const;
};

std::uint64_t fnv1a(const std::string& text);

}  // namespace driftlab
