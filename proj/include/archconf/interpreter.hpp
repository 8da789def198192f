#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "archconf/automaton.hpp"
#include "archconf/bundled_catalog.hpp"
#include "archconf/detector.hpp"
#include "archconf/errors.hpp"
#include "archconf/events.hpp"
#include "archconf/static_model.hpp"

namespace archconf {

struct Interpretation {
  std::string cause_id;
  std::string title;
  std::string body;
  std::string source;

  bool operator==(const Interpretation&) const = default;
};

struct CatalogEntry {
  NcKind kind;
  Interpretation interpretation;
};

/// Parses catalog records `cause_id | kind | title | body | source`. Blank
/// lines and lines starting with '#' are ignored.
inline std::vector<CatalogEntry> parse_catalog(std::string_view text) {
  std::vector<CatalogEntry> out;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto bar = line.find('|', start);
      fields.push_back(detail::trim(std::string_view(line).substr(start, bar == std::string::npos ? std::string::npos : bar - start)));
      if (bar == std::string::npos) break;
      start = bar + 1;
    }
    if (fields.size() != 5) throw MalformedLine(line_no, "catalog record needs exactly five fields");
    for (const auto& f : fields)
      if (f.empty()) throw MalformedLine(line_no, "empty catalog field");
    NcKind kind;
    if (fields[1] == "static") kind = NcKind::Static;
    else if (fields[1] == "dynamic") kind = NcKind::Dynamic;
    else throw MalformedLine(line_no, "kind must be 'static' or 'dynamic'");
    if (!ids.insert(fields[0]).second) throw MalformedLine(line_no, "duplicate cause_id '" + fields[0] + "'");
    out.push_back({kind, {fields[0], fields[2], fields[3], fields[4]}});
  }
  return out;
}

inline const std::vector<CatalogEntry>& bundled_catalog() {
  static const std::vector<CatalogEntry> catalog = parse_catalog(kBundledCatalog);
  return catalog;
}

// Interpretations depend only on the kind of non-conformance. Catalog order
// is preserved.
inline std::vector<Interpretation> interpretations_for(NcKind kind,
                                                       const std::vector<CatalogEntry>& catalog = bundled_catalog()) {
  std::vector<Interpretation> out;
  for (const auto& e : catalog)
    if (e.kind == kind) out.push_back(e.interpretation);
  return out;
}

struct CallSummary {
  std::string caller;
  std::string callee;
  std::string method;
  std::string path_template;
  std::uint64_t count = 1;

  bool operator==(const CallSummary&) const = default;
};

struct StaticNcDetails {
  std::optional<StateMachine> submachine;  // fragment with the unexpected behavior
  std::string source_machine;              // scope label of the machine it was cut from
  std::vector<CallSummary> frequent_calls;
};

struct DynamicNcDetails {
  std::optional<Traceability> code_pointer;
  std::vector<Flow> trigger_sequence;
  std::vector<CallSummary> call_details;
};

struct NcDetails {
  std::variant<StaticNcDetails, DynamicNcDetails> details;
  std::vector<StateMachine> service_machines;  // machines learned for the involved services

  bool is_static() const { return std::holds_alternative<StaticNcDetails>(details); }
  const StaticNcDetails& static_details() const { return std::get<StaticNcDetails>(details); }
  const DynamicNcDetails& dynamic_details() const { return std::get<DynamicNcDetails>(details); }
};

using EndpointPredicate = std::function<bool(const std::string& src, const std::string& dst)>;

inline EndpointPredicate between(std::string a, std::string b) {
  return [a = std::move(a), b = std::move(b)](const std::string& s, const std::string& d) { return s == a && d == b; };
}

inline EndpointPredicate touching(std::string node) {
  return [node = std::move(node)](const std::string& s, const std::string& d) { return s == node || d == node; };
}

inline EndpointPredicate involving(const NonConformance& nc) {
  return nc.is_edge() ? between(nc.sender(), nc.receiver()) : touching(nc.sender());
}

inline bool has_transition_matching(const StateMachine& sm, const EndpointPredicate& pred) {
  for (const auto& [key, t] : sm.transitions) {
    auto p = parse_symbol(key.second);
    if (p && pred(p->src, p->dst)) return true;
  }
  return false;
}

/// Fragment of `sm` around the transitions whose endpoints satisfy `pred`:
/// those transitions plus every transition sharing a state with them. It is
/// rooted at the involved state closest to the initial state (ties by id) and
/// canonically renumbered. Context states may be unreachable from that root.
inline StateMachine unexpected_behavior_submachine(const StateMachine& sm, const EndpointPredicate& pred,
                                                   const std::string& a, const std::string& b) {
  std::set<StateId> involved_states;
  for (const auto& [key, t] : sm.transitions) {
    auto p = parse_symbol(key.second);
    if (p && pred(p->src, p->dst)) {
      involved_states.insert(key.first);
      involved_states.insert(t.target);
    }
  }
  if (involved_states.empty()) throw NoInvolvedTransitions(a, b);

  StateMachine sub;
  sub.name = sm.name;
  sub.states = involved_states;
  for (const auto& [key, t] : sm.transitions) {
    if (involved_states.count(key.first) || involved_states.count(t.target)) {
      sub.transitions.emplace(key, t);
      sub.states.insert(key.first);
      sub.states.insert(t.target);
    }
  }
  const auto dist = bfs_distances(sm, sm.initial);
  auto rank = [&](StateId s) {
    auto it = dist.find(s);
    return std::make_pair(it == dist.end() ? std::numeric_limits<std::size_t>::max() : it->second, s);
  };
  sub.initial = *std::min_element(involved_states.begin(), involved_states.end(),
                                  [&](StateId x, StateId y) { return rank(x) < rank(y); });
  return canonicalize(sub);
}

inline StateMachine unexpected_behavior_submachine(const StateMachine& sm, const std::string& a,
                                                   const std::string& b) {
  return unexpected_behavior_submachine(sm, between(a, b), a, b);
}

/// Calls matching `pred`, grouped by (caller, callee, method, path template),
/// most frequent first with lexicographic tie-break, at most top_n entries.
inline std::vector<CallSummary> most_frequent_calls(const StateMachine& sm, const EndpointPredicate& pred,
                                                    std::size_t top_n) {
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::uint64_t> grouped;
  for (const auto& [symbol, freq] : transition_frequencies(sm)) {
    auto p = parse_symbol(symbol);
    if (p && pred(p->src, p->dst)) grouped[{p->src, p->dst, p->method, p->path}] += freq;
  }
  std::vector<CallSummary> out;
  for (const auto& [k, count] : grouped)
    out.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k), count});
  std::stable_sort(out.begin(), out.end(), [](const CallSummary& x, const CallSummary& y) { return x.count > y.count; });
  if (out.size() > top_n) out.resize(top_n);
  return out;
}

inline std::vector<CallSummary> most_frequent_calls(const StateMachine& sm, const std::string& a,
                                                    const std::string& b, std::size_t top_n = 5) {
  return most_frequent_calls(sm, between(a, b), top_n);
}

namespace detail {

// Flow stereotypes of the form "<METHOD> /path" describe the HTTP call.
inline std::optional<CallSummary> call_from_flow(const Flow& f) {
  static const std::regex kCall(R"(^\s*([A-Z]+)\s+(/\S*)\s*$)");
  for (const auto& s : f.stereotypes) {
    std::smatch m;
    if (std::regex_match(s, m, kCall) && is_http_method(m[1].str()))
      return CallSummary{f.sender, f.receiver, m[1].str(), template_path(m[2].str()), 1};
  }
  return std::nullopt;
}

// Lexicographically smallest shortest path (as a node sequence) from any
// entry node to `target`. Empty when target is itself an entry, nullopt when
// no entry reaches it.
inline std::optional<std::vector<Flow>> shortest_entry_path(const StaticModel& m, const std::string& target) {
  std::map<std::string, std::vector<std::string>> succ;
  std::map<std::string, std::vector<std::string>> pred;
  std::map<std::string, std::size_t> in_degree;
  for (const auto* group : {&m.services, &m.external_entities})
    for (const auto& n : *group) in_degree[n.name];
  for (const auto& f : m.flows) {
    if (f.sender == f.receiver) continue;
    succ[f.sender].push_back(f.receiver);
    pred[f.receiver].push_back(f.sender);
    ++in_degree[f.receiver];
  }
  std::set<std::string> entries;
  for (const auto& e : m.external_entities) entries.insert(e.name);
  for (const auto& [name, deg] : in_degree)
    if (deg == 0) entries.insert(name);
  if (entries.count(target)) return std::vector<Flow>{};

  std::map<std::string, std::size_t> to_target{{target, 0}};
  std::deque<std::string> queue{target};
  while (!queue.empty()) {
    const std::string v = queue.front();
    queue.pop_front();
    for (const auto& u : pred[v])
      if (to_target.try_emplace(u, to_target[v] + 1).second) queue.push_back(u);
  }
  std::optional<std::string> start;
  for (const auto& e : entries) {
    auto it = to_target.find(e);
    if (it != to_target.end() && (!start || it->second < to_target[*start])) start = e;
  }
  if (!start) return std::nullopt;

  std::vector<Flow> path;
  std::string at = *start;
  while (at != target) {
    const std::size_t remaining = to_target.at(at);
    std::optional<std::string> next;
    for (const auto& w : succ[at]) {
      auto it = to_target.find(w);
      if (it != to_target.end() && it->second + 1 == remaining && (!next || w < *next)) next = w;
    }
    path.push_back(*m.find_flow(at, *next));
    at = *next;
  }
  return path;
}

}  // namespace detail

/// Details for a node or edge declared statically but never observed: the
/// code location behind it, the shortest flow path from an entry node
/// (external entity or zero in-degree node) that should have triggered it,
/// and call details taken from the flow stereotypes.
inline DynamicNcDetails dynamic_nc_details(const StaticModel& m, const NonConformance& nc) {
  DynamicNcDetails d;
  if (nc.is_edge()) {
    const Flow* missing = m.find_flow(nc.sender(), nc.receiver());
    Flow flow = missing ? *missing : Flow{nc.sender(), nc.receiver(), {}, std::nullopt};
    d.code_pointer = flow.traceability;
    if (nc.sender() == nc.receiver()) {
      d.trigger_sequence = {flow};
    } else {
      if (auto prefix = detail::shortest_entry_path(m, nc.sender())) {
        d.trigger_sequence = std::move(*prefix);
        d.trigger_sequence.push_back(flow);
      }
    }
  } else {
    if (const ServiceNode* n = m.find_node(nc.sender())) d.code_pointer = n->traceability;
    d.trigger_sequence = detail::shortest_entry_path(m, nc.sender()).value_or(std::vector<Flow>{});
  }
  for (const auto& f : d.trigger_sequence)
    if (auto call = detail::call_from_flow(f)) d.call_details.push_back(*call);
  return d;
}

}  // namespace archconf
