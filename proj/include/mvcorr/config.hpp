#pragma once

#include <map>
#include <string>
#include <vector>

#include "mvcorr/errors.hpp"

namespace mvcorr {

/// Flat key-value experiment configuration with section-prefixed keys
/// (`train.batch_size=200`). Parsed fully before any command executes;
/// every parse or type error names the offending key.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_text(const std::string& text);

  /// Applies one `key=value` override (the --set flag).
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;  // throws when absent
  std::string get_string(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key, long fallback) const;
  long require_int(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<long> get_int_list(const std::string& key,
                                 const std::vector<long>& fallback) const;

  /// Canonical text form (sorted keys), echoed into model files.
  std::string to_text() const;

 private:
  long parse_int(const std::string& key, const std::string& value) const;
  double parse_double(const std::string& key, const std::string& value) const;

  std::map<std::string, std::string> values_;
};

}  // namespace mvcorr
