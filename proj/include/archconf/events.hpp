#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "archconf/errors.hpp"
#include "archconf/names.hpp"
#include "json.hpp"

namespace archconf {

struct HttpEvent {
  std::int64_t ts = 0;  // ms since epoch
  std::string src;
  std::string dst;
  std::string method;
  std::string path;
  std::optional<int> status;
  std::size_t source_line = 0;  // 1-based line in the log, 0 when synthetic

  bool operator==(const HttpEvent&) const = default;
};

inline constexpr std::array<std::string_view, 7> kHttpMethods = {
    "GET", "POST", "PUT", "DELETE", "PATCH", "HEAD", "OPTIONS"};

inline bool is_http_method(std::string_view m) {
  return std::find(kHttpMethods.begin(), kHttpMethods.end(), m) != kHttpMethods.end();
}

// Transition labels are strings of the form "<src>→<dst>:<METHOD> <path>".
using Symbol = std::string;

inline constexpr std::string_view kArrow = "→";

struct SymbolParts {
  std::string src;
  std::string dst;
  std::string method;
  std::string path;

  bool operator==(const SymbolParts&) const = default;
};

inline Symbol format_symbol(const SymbolParts& p) {
  Symbol s;
  s.reserve(p.src.size() + p.dst.size() + p.method.size() + p.path.size() + 6);
  s.append(p.src).append(kArrow).append(p.dst).append(":").append(p.method).append(" ").append(p.path);
  return s;
}

inline std::optional<SymbolParts> parse_symbol(std::string_view s) {
  const auto arrow = s.find(kArrow);
  if (arrow == std::string_view::npos || arrow == 0) return std::nullopt;
  const auto rest = s.substr(arrow + kArrow.size());
  const auto colon = rest.find(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  const auto tail = rest.substr(colon + 1);
  const auto space = tail.find(' ');
  if (space == std::string_view::npos || space == 0) return std::nullopt;
  const auto path = tail.substr(space + 1);
  if (path.empty() || path.front() != '/') return std::nullopt;
  SymbolParts p{std::string(s.substr(0, arrow)), std::string(rest.substr(0, colon)),
                std::string(tail.substr(0, space)), std::string(path)};
  if (p.src.find(kArrow) != std::string::npos || p.dst.find(kArrow) != std::string::npos)
    return std::nullopt;
  return p;
}

struct TraceOrigin {
  std::string file;
  std::size_t first_line = 0;
  std::size_t last_line = 0;

  bool operator==(const TraceOrigin&) const = default;
};

struct Trace {
  std::vector<Symbol> symbols;
  TraceOrigin origin;

  bool operator==(const Trace&) const = default;
};

/// Parses a JSON Lines event log. Blank lines are skipped; line numbers in
/// errors are 1-based.
inline std::vector<HttpEvent> parse_event_log(std::string_view jsonl_text) {
  using nlohmann::json;
  std::vector<HttpEvent> events;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl_text.size()) {
    auto end = jsonl_text.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl_text.size();
    auto line = jsonl_text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error&) {
      throw MalformedLine(line_no, "not valid JSON");
    }
    if (!obj.is_object()) throw MalformedLine(line_no, "expected a JSON object");

    auto field = [&](const char* key) -> const json& {
      auto it = obj.find(key);
      if (it == obj.end()) throw MissingField("line " + std::to_string(line_no) + ": " + key);
      return *it;
    };
    auto bad = [&](const char* key, const char* why) {
      return InvalidField("line " + std::to_string(line_no) + ": " + key, why);
    };
    auto name = [&](const char* key) {
      const json& v = field(key);
      if (!v.is_string()) throw bad(key, "expected string");
      try {
        return normalize_name(v.get<std::string>());
      } catch (const EmptyAfterNormalization&) {
        throw bad(key, "empty after normalization");
      }
    };

    HttpEvent ev;
    const json& ts = field("ts");
    if (!ts.is_number_integer()) throw bad("ts", "expected integer");
    ev.ts = ts.get<std::int64_t>();
    if (ev.ts < 0) throw bad("ts", "must be >= 0");
    ev.src = name("src");
    ev.dst = name("dst");
    const json& method = field("method");
    if (!method.is_string() || !is_http_method(method.get<std::string>()))
      throw bad("method", "expected an HTTP verb");
    ev.method = method.get<std::string>();
    const json& path = field("path");
    if (!path.is_string() || path.get<std::string>().empty() || path.get<std::string>()[0] != '/')
      throw bad("path", "expected a string starting with '/'");
    ev.path = path.get<std::string>();
    if (auto it = obj.find("status"); it != obj.end() && !it->is_null()) {
      if (!it->is_number_integer()) throw bad("status", "expected integer");
      ev.status = it->get<int>();
    }
    ev.source_line = line_no;
    events.push_back(std::move(ev));
  }
  return events;
}

namespace detail {

inline bool is_hex(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

inline bool is_uuid(std::string_view seg) {
  if (seg.size() != 36) return false;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    const bool dash = i == 8 || i == 13 || i == 18 || i == 23;
    if (dash ? seg[i] != '-' : !is_hex(seg[i])) return false;
  }
  return true;
}

inline bool is_digits(std::string_view seg) {
  return !seg.empty() &&
         std::all_of(seg.begin(), seg.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Characters that would break the label grammar are percent-encoded.
inline void append_label_safe(std::string& out, std::string_view seg) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  for (char c : seg) {
    const auto u = static_cast<unsigned char>(c);
    if (c == '"' || c == '|' || c == '\\' || u <= 0x20 || u == 0x7f) {
      out.push_back('%');
      out.push_back(kHex[u >> 4]);
      out.push_back(kHex[u & 0xf]);
    } else {
      out.push_back(c);
    }
  }
}

}  // namespace detail

// Replaces identifier-like segments (all digits, UUIDs, longer than 24 chars)
// with "{}" and drops the query string and fragment.
inline std::string template_path(std::string_view path) {
  if (auto q = path.find_first_of("?#"); q != std::string_view::npos) path = path.substr(0, q);
  std::string out;
  out.reserve(path.size());
  std::size_t pos = 0;
  while (pos < path.size()) {
    if (path[pos] == '/') {
      out.push_back('/');
      ++pos;
      continue;
    }
    auto end = path.find('/', pos);
    if (end == std::string_view::npos) end = path.size();
    const auto seg = path.substr(pos, end - pos);
    if (detail::is_digits(seg) || detail::is_uuid(seg) || seg.size() > 24)
      out += "{}";
    else
      detail::append_label_safe(out, seg);
    pos = end;
  }
  if (out.empty()) out = "/";
  return out;
}

inline Symbol event_symbol(const HttpEvent& e) {
  return format_symbol({e.src, e.dst, e.method, template_path(e.path)});
}

enum class TraceScope { Global, PerService };

// Key under which the single global scope is stored. Normalized service names
// never contain '_', so it cannot collide with a per-service key.
inline constexpr std::string_view kGlobalScopeKey = "_global";

namespace detail {

inline void segment(const std::vector<const HttpEvent*>& seq, std::int64_t gap_ms,
                    const std::string& file, std::vector<Trace>& out) {
  const HttpEvent* prev = nullptr;
  for (const HttpEvent* e : seq) {
    if (prev == nullptr || e->ts - prev->ts > gap_ms) {
      out.push_back(Trace{{}, TraceOrigin{file, e->source_line, e->source_line}});
    }
    Trace& t = out.back();
    t.symbols.push_back(event_symbol(*e));
    t.origin.first_line = std::min(t.origin.first_line, e->source_line);
    t.origin.last_line = std::max(t.origin.last_line, e->source_line);
    prev = e;
  }
}

}  // namespace detail

/// Splits the event stream into traces: a new trace starts whenever the gap to
/// the previous event of the same scope exceeds gap_ms. Events are stably
/// sorted by timestamp first.
inline std::map<std::string, std::vector<Trace>> extract_traces(const std::vector<HttpEvent>& events,
                                                                std::int64_t gap_ms, TraceScope scope,
                                                                const std::string& origin_file = "") {
  std::vector<const HttpEvent*> sorted;
  sorted.reserve(events.size());
  for (const auto& e : events) sorted.push_back(&e);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const HttpEvent* a, const HttpEvent* b) { return a->ts < b->ts; });

  std::map<std::string, std::vector<Trace>> result;
  if (sorted.empty()) return result;

  if (scope == TraceScope::Global) {
    detail::segment(sorted, gap_ms, origin_file, result[std::string(kGlobalScopeKey)]);
    return result;
  }
  std::map<std::string, std::vector<const HttpEvent*>> per_service;
  for (const HttpEvent* e : sorted) {
    per_service[e->src].push_back(e);
    if (e->dst != e->src) per_service[e->dst].push_back(e);
  }
  for (const auto& [service, seq] : per_service) {
    detail::segment(seq, gap_ms, origin_file, result[service]);
  }
  return result;
}

}  // namespace archconf
