#include "srpkit/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "srpkit/utf8.hpp"

namespace srp {

namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      {"align.threshold", "0.01"},
      {"align.mode", "both"},
      {"cap", "150"},
      {"window", "64"},
      {"scoring", "bounded"},
      {"cutoff.DE-EN", "0.3"},
      {"cutoff.EN-DE", "0.5"},
      {"seed", "42"},
      {"split.test_docs", "170"},
      {"split.min_segments", "12"},
      {"random_effects", "speaker_id"},
      {"gam.splines", "5"},
      {"gam.orientation", "lm_on_mt"},
      {"variant", "base"},
      {"workers", "0"},
      {"width.doc", "3"},
      {"width.seg", "2"},
      {"width.word", "3"},
      {"gzip", "true"},
  };
  return d;
}

std::string env_name(const std::string& key) {
  std::string out = "SRPKIT_";
  for (char c : key) {
    if (c == '.' || c == '-')
      out += '_';
    else
      out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& [k, v] : defaults()) {
    values_[k] = v;
    origin_[k] = "default";
  }
}

void RunConfig::load_text(std::string_view text, const std::string& origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string body = utf8::strip_ws(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(n) + ": expected key = value");
    std::string key = utf8::strip_ws(body.substr(0, eq));
    std::string value = utf8::strip_ws(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(n) + ": empty key");
    set(key, value, origin);
  }
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  base_dir_ = std::filesystem::path(path).parent_path().string();
  load_text(ss.str(), path);
}

void RunConfig::load_env(char** envp) {
  if (!envp) return;
  std::map<std::string, std::string> env;
  for (char** e = envp; *e; ++e) {
    std::string_view kv(*e);
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    env.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
  }
  std::vector<std::string> keys;
  for (const auto& [k, v] : values_) keys.push_back(k);
  for (const auto& k : keys) {
    auto it = env.find(env_name(k));
    if (it != env.end()) set(k, it->second, "env");
  }
  // Keys without a default can still come from the environment.
  static const char* extra[] = {"input", "output", "parser", "lm_base", "lm_ft", "mt_base",
                                "mt_ft", "encoder", "replay", "direction", "mode",
                                "doc_meta", "spoken_meta"};
  for (const char* k : extra) {
    auto it = env.find(env_name(k));
    if (it != env.end()) set(k, it->second, "env");
  }
}

void RunConfig::set(const std::string& key, const std::string& value, const std::string& origin) {
  values_[key] = value;
  origin_[key] = origin;
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing configuration key '" + key + "'");
  return it->second;
}

std::string RunConfig::get_or(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::optional<std::string> RunConfig::get_opt(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

double RunConfig::get_real(const std::string& key) const {
  std::string v = get(key);
  double out = 0.0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError("'" + key + "' must be a number, got '" + v + "'");
  return out;
}

long RunConfig::get_int(const std::string& key) const {
  std::string v = get(key);
  long out = 0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError("'" + key + "' must be an integer, got '" + v + "'");
  return out;
}

std::string RunConfig::origin(const std::string& key) const {
  auto it = origin_.find(key);
  return it == origin_.end() ? "unset" : it->second;
}

void RunConfig::validate() const {
  for (const auto& [k, v] : values_) {
    if (k == "align.threshold" || k.rfind("cutoff.", 0) == 0) {
      if (!(get_real(k) > 0)) throw ConfigError("'" + k + "' must be positive");
    }
  }
  for (const char* k : {"cap", "window", "split.test_docs", "split.min_segments", "gam.splines"})
    if (get_int(k) <= 0) throw ConfigError(std::string("'") + k + "' must be positive");
  if (get_int("window") < 2) throw ConfigError("'window' must be at least 2");
  if (get_int("gam.splines") < 4) throw ConfigError("'gam.splines' must be at least 4");
  if (get_int("workers") < 0) throw ConfigError("'workers' must not be negative");
  auto mode = get("align.mode");
  if (mode != "both" && mode != "mean") throw ConfigError("'align.mode' must be both or mean");
  auto scoring = get("scoring");
  if (scoring != "bounded" && scoring != "window")
    throw ConfigError("'scoring' must be bounded or window");
  auto orient = get("gam.orientation");
  if (orient != "lm_on_mt" && orient != "mt_on_lm")
    throw ConfigError("'gam.orientation' must be lm_on_mt or mt_on_lm");
  get_int("seed");
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string RunConfig::hash() const {
  std::string canon;
  for (const auto& [k, v] : values_) canon += k + "=" + v + "\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canon)));
  return buf;
}

std::string RunConfig::resolve_path(const std::string& p) const {
  if (p.empty() || base_dir_.empty() || std::filesystem::path(p).is_absolute()) return p;
  if (std::filesystem::exists(p)) return p;
  return (std::filesystem::path(base_dir_) / p).string();
}

double score_cutoff(const RunConfig& cfg, const std::string& lpair) {
  return cfg.get_real("cutoff." + lpair);
}

}  // namespace srp
