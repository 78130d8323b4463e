#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace srp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key=value run configuration. Values are resolved with the
// precedence flags > environment (SRPKIT_<KEY>) > config file > defaults.
class RunConfig {
 public:
  RunConfig();  // defaults

  // Parses "key = value" lines; "#" starts a comment. Unknown keys are kept.
  void load_text(std::string_view text, const std::string& origin = "config");
  void load_file(const std::string& path);
  // Applies SRPKIT_<KEY> variables ('.' and '-' in keys become '_').
  void load_env(char** envp);
  void set(const std::string& key, const std::string& value, const std::string& origin = "flag");

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;  // throws ConfigError when unset
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_real(const std::string& key) const;
  long get_int(const std::string& key) const;
  std::optional<std::string> get_opt(const std::string& key) const;
  std::string origin(const std::string& key) const;

  // Every resolved entry, sorted by key.
  const std::map<std::string, std::string>& values() const { return values_; }
  // Positive-threshold and range checks; throws ConfigError.
  void validate() const;
  // FNV-1a 64 over the sorted "key=value" lines, as 16 hex digits.
  std::string hash() const;
  // Directory relative paths in the config file resolve against.
  std::string base_dir() const { return base_dir_; }
  std::string resolve_path(const std::string& p) const;

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> origin_;
  std::string base_dir_;
};

std::uint64_t fnv1a64(std::string_view data);

// Score cutoff of one direction ("cutoff.DE-EN").
double score_cutoff(const RunConfig& cfg, const std::string& lpair);

}  // namespace srp
