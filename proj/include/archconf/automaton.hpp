#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ranges>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "archconf/errors.hpp"
#include "archconf/events.hpp"

namespace archconf {

using StateId = unsigned;

struct Transition {
  StateId target = 0;
  std::uint64_t frequency = 1;

  bool operator==(const Transition&) const = default;
};

using TransitionKey = std::pair<StateId, Symbol>;

// Deterministic automaton with transition frequencies. Acceptance has no
// final-state set: a trace is accepted iff every symbol can be followed.
struct StateMachine {
  std::set<StateId> states{0};
  StateId initial = 0;
  std::map<TransitionKey, Transition> transitions;
  std::string name;

  // Equality ignores the scope label.
  bool operator==(const StateMachine& o) const {
    return states == o.states && initial == o.initial && transitions == o.transitions;
  }

  std::size_t state_count() const { return states.size(); }
  std::size_t transition_count() const { return transitions.size(); }

  const Transition* find(StateId from, const Symbol& symbol) const {
    auto it = transitions.find({from, symbol});
    return it == transitions.end() ? nullptr : &it->second;
  }

  // Outgoing transitions of `from`, ordered by label.
  auto outgoing(StateId from) const {
    auto lo = transitions.lower_bound({from, Symbol{}});
    auto hi = from == std::numeric_limits<StateId>::max() ? transitions.end()
                                                          : transitions.lower_bound({from + 1, Symbol{}});
    return std::ranges::subrange(lo, hi);
  }

  // Adds a transition; throws when (from, symbol) already has a target.
  void add_transition(StateId from, const Symbol& symbol, StateId to, std::uint64_t frequency) {
    auto [it, fresh] = transitions.try_emplace({from, symbol}, Transition{to, frequency});
    if (!fresh) throw NondeterministicTransition(from, symbol);
    states.insert(from);
    states.insert(to);
  }
};

// Breadth-first distances from `root` along transition direction.
inline std::map<StateId, std::size_t> bfs_distances(const StateMachine& sm, StateId root) {
  std::map<StateId, std::size_t> dist{{root, 0}};
  std::deque<StateId> queue{root};
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    for (const auto& [key, t] : sm.outgoing(s)) {
      if (dist.try_emplace(t.target, dist[s] + 1).second) queue.push_back(t.target);
    }
  }
  return dist;
}

// Throws UnreachableState unless every state is reachable from the initial one.
inline void check_reachability(const StateMachine& sm) {
  const auto dist = bfs_distances(sm, sm.initial);
  for (StateId s : sm.states)
    if (!dist.count(s)) throw UnreachableState(s);
}

// Renumbers states breadth-first from the initial state, visiting successors
// in label order. States not reachable from the initial state (possible only
// for extracted fragments) follow in ascending original id, each seeding its
// own breadth-first sweep.
inline StateMachine canonicalize(const StateMachine& sm) {
  std::map<StateId, StateId> renumber;
  auto sweep = [&](StateId root) {
    if (renumber.count(root)) return;
    std::deque<StateId> queue{root};
    renumber.emplace(root, static_cast<StateId>(renumber.size()));
    while (!queue.empty()) {
      const StateId s = queue.front();
      queue.pop_front();
      for (const auto& [key, t] : sm.outgoing(s)) {
        if (renumber.try_emplace(t.target, static_cast<StateId>(renumber.size())).second)
          queue.push_back(t.target);
      }
    }
  };
  sweep(sm.initial);
  for (StateId s : sm.states) sweep(s);

  StateMachine out;
  out.name = sm.name;
  out.states.clear();
  for (const auto& [old_id, new_id] : renumber) out.states.insert(new_id);
  out.initial = renumber.at(sm.initial);
  for (const auto& [key, t] : sm.transitions) {
    out.transitions.emplace(TransitionKey{renumber.at(key.first), key.second},
                            Transition{renumber.at(t.target), t.frequency});
  }
  return out;
}

namespace detail {

struct DotStatement {
  std::string text;
  std::size_t line;
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

/// Parses the DOT subset:
///   digraph sm {
///     __start -> <init>;
///     <src> -> <dst> [label="<symbol> | <freq>"];
///   }
/// Statements may share a line. The result is validated (determinism and
/// reachability).
inline StateMachine parse_state_machine(std::string_view dot_text, std::string name = {}) {
  static const std::regex kHeader(R"(^\s*digraph\s+sm\s*\{)");
  static const std::regex kStart(R"(^__start\s*->\s*(\d+)$)");
  static const std::regex kEdge(R"re(^(\d+)\s*->\s*(\d+)\s*\[\s*label\s*=\s*"([^"]*)"\s*\]$)re");

  const std::string text(dot_text);
  std::smatch header;
  if (!std::regex_search(text, header, kHeader)) throw MalformedDot(1, "expected 'digraph sm {'");

  std::size_t line = 1 + static_cast<std::size_t>(
                             std::count(text.begin(), text.begin() + header.length(0), '\n'));
  std::vector<detail::DotStatement> statements;
  std::string current;
  std::size_t current_line = line;
  bool in_quotes = false;
  bool closed = false;
  for (std::size_t i = static_cast<std::size_t>(header.length(0)); i < text.size(); ++i) {
    const char c = text[i];
    if (closed) {
      if (c == '\n') ++line;
      else if (c != ' ' && c != '\t' && c != '\r') throw MalformedDot(line, "content after closing brace");
      continue;
    }
    if (c == '"') in_quotes = !in_quotes;
    if (!in_quotes && (c == ';' || c == '}')) {
      auto stmt = detail::trim(current);
      if (!stmt.empty()) statements.push_back({std::move(stmt), current_line});
      else if (c == ';') throw MalformedDot(line, "empty statement");
      current.clear();
      if (c == '}') closed = true;
      continue;
    }
    if (c == '\n') {
      if (in_quotes) throw MalformedDot(line, "newline inside label");
      ++line;
    }
    if (detail::trim(current).empty() && c != ' ' && c != '\t' && c != '\r' && c != '\n')
      current_line = line;
    current.push_back(c);
  }
  if (!closed) throw MalformedDot(line, "missing closing '}'");

  StateMachine sm;
  sm.name = std::move(name);
  sm.states.clear();
  std::optional<StateId> initial;
  auto to_state = [](const std::string& digits, std::size_t at) {
    try {
      const unsigned long v = std::stoul(digits);
      if (v > std::numeric_limits<StateId>::max()) throw MalformedDot(at, "state id out of range");
      return static_cast<StateId>(v);
    } catch (const std::out_of_range&) {
      throw MalformedDot(at, "state id out of range");
    }
  };
  for (const auto& stmt : statements) {
    std::smatch m;
    if (std::regex_match(stmt.text, m, kStart)) {
      if (initial) throw MalformedDot(stmt.line, "duplicate __start");
      initial = to_state(m[1].str(), stmt.line);
      sm.states.insert(*initial);
      continue;
    }
    if (!std::regex_match(stmt.text, m, kEdge)) throw MalformedDot(stmt.line, "unrecognized statement");
    const std::string label = m[3].str();
    const auto bar = label.rfind(" | ");
    if (bar == std::string::npos) throw MalformedDot(stmt.line, "label must be '<symbol> | <freq>'");
    const std::string symbol = label.substr(0, bar);
    const std::string freq = label.substr(bar + 3);
    if (symbol.empty() || symbol.find('|') != std::string::npos)
      throw MalformedDot(stmt.line, "invalid symbol");
    static const std::regex kFreq(R"(^[1-9]\d*$)");
    if (!std::regex_match(freq, kFreq)) throw MalformedDot(stmt.line, "frequency must be a positive integer");
    std::uint64_t frequency = 0;
    try {
      frequency = std::stoull(freq);
    } catch (const std::out_of_range&) {
      throw MalformedDot(stmt.line, "frequency out of range");
    }
    sm.add_transition(to_state(m[1].str(), stmt.line), symbol, to_state(m[2].str(), stmt.line), frequency);
  }
  if (!initial) throw MalformedDot(line, "missing '__start -> <init>;'");
  sm.initial = *initial;
  check_reachability(sm);
  return sm;
}

// Canonical text: transitions sorted by (source id, label). Equal machines
// serialize to identical bytes.
inline std::string serialize_state_machine(const StateMachine& sm) {
  std::string out = "digraph sm {\n  __start -> " + std::to_string(sm.initial) + ";\n";
  for (const auto& [key, t] : sm.transitions) {
    out += "  " + std::to_string(key.first) + " -> " + std::to_string(t.target) + " [label=\"" +
           key.second + " | " + std::to_string(t.frequency) + "\"];\n";
  }
  out += "}\n";
  return out;
}

inline bool accepts(const StateMachine& sm, std::span<const Symbol> symbols) {
  StateId at = sm.initial;
  for (const auto& s : symbols) {
    const Transition* t = sm.find(at, s);
    if (t == nullptr) return false;
    at = t->target;
  }
  return true;
}

inline bool accepts(const StateMachine& sm, const Trace& trace) { return accepts(sm, trace.symbols); }

using SymbolFilter = std::function<bool(const Symbol&)>;

// Total frequency per symbol over all transitions, descending by frequency
// and then ascending by symbol.
inline std::vector<std::pair<Symbol, std::uint64_t>> transition_frequencies(
    const StateMachine& sm, const SymbolFilter& filter = {}) {
  std::map<Symbol, std::uint64_t> totals;
  for (const auto& [key, t] : sm.transitions) {
    if (!filter || filter(key.second)) totals[key.second] += t.frequency;
  }
  std::vector<std::pair<Symbol, std::uint64_t>> out(totals.begin(), totals.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

}  // namespace archconf
