#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "archconf/automaton.hpp"
#include "archconf/errors.hpp"
#include "archconf/learner.hpp"
#include "archconf/scenario.hpp"

namespace archconf {

enum class TraceScopes { Global, PerService, Both };

struct Config {
  std::int64_t session_gap_ms = 1000;
  double alpha = 0.05;
  std::uint64_t min_freq = 0;
  std::size_t top_n_calls = 5;
  bool include_externals = false;
  TraceScopes trace_scope = TraceScopes::Both;

  LearnerConfig learner() const { return {alpha, min_freq}; }
};

namespace detail {

// `key = value` lines; '#' starts a comment. Keys must be unique.
inline std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(std::string_view(trimmed).substr(0, eq));
    std::string value = trim(std::string_view(trimmed).substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    if (!seen.emplace(key, line_no).second)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& value, Int min_value) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size() || v < min_value)
    throw ConfigError("invalid value for " + key + ": '" + value + "'");
  return v;
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw ConfigError("invalid value for " + key + ": '" + value + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("invalid value for " + key + ": '" + value + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError("invalid value for " + key + ": '" + value + "' (expected true or false)");
}

}  // namespace detail

/// Parses a configuration file. Unknown keys are rejected.
inline Config parse_config(std::string_view text) {
  Config cfg;
  for (const auto& [key, value] : detail::parse_key_values(text)) {
    if (key == "session_gap_ms") cfg.session_gap_ms = detail::parse_int<std::int64_t>(key, value, 1);
    else if (key == "alpha") cfg.alpha = detail::parse_double(key, value);
    else if (key == "min_freq") cfg.min_freq = detail::parse_int<std::uint64_t>(key, value, 0);
    else if (key == "top_n_calls") cfg.top_n_calls = detail::parse_int<std::size_t>(key, value, 1);
    else if (key == "include_externals") cfg.include_externals = detail::parse_bool(key, value);
    else if (key == "trace_scope") {
      if (value == "global") cfg.trace_scope = TraceScopes::Global;
      else if (value == "per_service") cfg.trace_scope = TraceScopes::PerService;
      else if (value == "both") cfg.trace_scope = TraceScopes::Both;
      else throw ConfigError("invalid value for trace_scope: '" + value + "' (expected global, per_service or both)");
    } else {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  }
  validate(cfg.learner());
  return cfg;
}

inline ScenarioSpec parse_scenario_spec(std::string_view text) {
  ScenarioSpec spec;
  for (const auto& [key, value] : detail::parse_key_values(text)) {
    if (key == "n_services") spec.n_services = detail::parse_int<std::size_t>(key, value, 1);
    else if (key == "n_edges") spec.n_edges = detail::parse_int<std::size_t>(key, value, 1);
    else if (key == "n_injected_static_nc") spec.n_injected_static_nc = detail::parse_int<std::size_t>(key, value, 0);
    else if (key == "n_injected_dynamic_nc") spec.n_injected_dynamic_nc = detail::parse_int<std::size_t>(key, value, 0);
    else if (key == "n_events") spec.n_events = detail::parse_int<std::size_t>(key, value, 1);
    else if (key == "rng_seed") spec.rng_seed = detail::parse_int<std::uint64_t>(key, value, 0);
    else throw ConfigError("unknown scenario key '" + key + "'");
  }
  return spec;
}

}  // namespace archconf
