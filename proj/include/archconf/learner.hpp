#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "archconf/automaton.hpp"
#include "archconf/errors.hpp"
#include "archconf/events.hpp"

namespace archconf {

struct LearnerConfig {
  double alpha = 0.05;         // significance in (0, 1]; smaller merges more
  std::uint64_t min_freq = 0;  // states seen fewer times are always compatible
};

inline void validate(const LearnerConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
}

namespace detail {

// Mutable frequency tree used while merging. `ends` counts traces that stop
// at a node; it takes part in the compatibility test as a termination
// pseudo-symbol but is not exported.
struct MergeNode {
  std::map<Symbol, std::pair<std::size_t, std::uint64_t>> out;  // symbol -> (child, freq)
  std::uint64_t ends = 0;

  std::uint64_t total() const {
    std::uint64_t n = ends;
    for (const auto& [s, edge] : out) n += edge.second;
    return n;
  }
};

// Prefix tree with node ids in breadth-first order (children by label).
inline std::vector<MergeNode> prefix_tree(std::span<const Trace> traces) {
  std::vector<MergeNode> raw(1);
  for (const auto& t : traces) {
    std::size_t at = 0;
    for (const auto& s : t.symbols) {
      auto it = raw[at].out.find(s);
      if (it == raw[at].out.end()) {
        raw.emplace_back();
        it = raw[at].out.emplace(s, std::make_pair(raw.size() - 1, std::uint64_t{0})).first;
      }
      ++it->second.second;
      at = it->second.first;
    }
    ++raw[at].ends;
  }
  std::vector<std::size_t> order{0};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (const auto& [s, edge] : raw[order[i]].out) order.push_back(edge.first);
  std::vector<std::size_t> renumber(raw.size());
  for (std::size_t i = 0; i < order.size(); ++i) renumber[order[i]] = i;
  std::vector<MergeNode> tree(raw.size());
  for (std::size_t old_id = 0; old_id < raw.size(); ++old_id) {
    MergeNode& n = tree[renumber[old_id]];
    n.ends = raw[old_id].ends;
    for (const auto& [s, edge] : raw[old_id].out) n.out.emplace(s, std::make_pair(renumber[edge.first], edge.second));
  }
  return tree;
}

inline StateMachine export_machine(const std::vector<MergeNode>& nodes) {
  StateMachine sm;
  std::deque<std::size_t> queue{0};
  std::set<std::size_t> seen{0};
  while (!queue.empty()) {
    const std::size_t n = queue.front();
    queue.pop_front();
    for (const auto& [s, edge] : nodes[n].out) {
      sm.add_transition(static_cast<StateId>(n), s, static_cast<StateId>(edge.first), edge.second);
      if (seen.insert(edge.first).second) queue.push_back(edge.first);
    }
  }
  return canonicalize(sm);
}

}  // namespace detail

/// Hoeffding bound used by the compatibility test for two states observed
/// n1 and n2 times.
inline double hoeffding_bound(double alpha, std::uint64_t n1, std::uint64_t n2) {
  return std::sqrt(0.5 * std::log(2.0 / alpha)) *
         (1.0 / std::sqrt(static_cast<double>(n1)) + 1.0 / std::sqrt(static_cast<double>(n2)));
}

inline bool hoeffding_compatible(double alpha, std::uint64_t f1, std::uint64_t n1, std::uint64_t f2,
                                 std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) return true;
  const double diff = std::abs(static_cast<double>(f1) / static_cast<double>(n1) -
                               static_cast<double>(f2) / static_cast<double>(n2));
  return diff < hoeffding_bound(alpha, n1, n2);
}

/// Prefix tree acceptor over the traces; frequencies count traces sharing
/// each prefix extension.
inline StateMachine build_pta(std::span<const Trace> traces) {
  if (traces.empty()) throw EmptyTraceSet();
  return detail::export_machine(detail::prefix_tree(traces));
}

namespace detail {

class RedBlueMerger {
 public:
  RedBlueMerger(std::vector<MergeNode> tree, const LearnerConfig& cfg)
      : nodes_(std::move(tree)), cfg_(cfg), parent_(nodes_.size()), red_(nodes_.size(), false) {
    for (std::size_t n = 0; n < nodes_.size(); ++n)
      for (const auto& [s, edge] : nodes_[n].out) parent_[edge.first] = {n, s};
    red_[0] = true;
    reds_.insert(0);
  }

  std::vector<MergeNode> run() {
    for (;;) {
      const auto blue = next_blue();
      if (!blue) break;
      bool merged = false;
      for (std::size_t r : reds_) {
        if (compatible(r, *blue)) {
          merge(r, *blue);
          merged = true;
          break;
        }
      }
      if (!merged) {
        red_[*blue] = true;
        reds_.insert(*blue);
      }
    }
    return std::move(nodes_);
  }

 private:
  std::optional<std::size_t> next_blue() const {
    std::optional<std::size_t> best;
    for (std::size_t r : reds_)
      for (const auto& [s, edge] : nodes_[r].out)
        if (!red_[edge.first] && (!best || edge.first < *best)) best = edge.first;
    return best;
  }

  bool pair_compatible(const MergeNode& a, const MergeNode& b) const {
    const std::uint64_t na = a.total();
    const std::uint64_t nb = b.total();
    if (na < cfg_.min_freq || nb < cfg_.min_freq) return true;
    if (!hoeffding_compatible(cfg_.alpha, a.ends, na, b.ends, nb)) return false;
    for (const auto& [s, edge] : a.out) {
      auto it = b.out.find(s);
      const std::uint64_t fb = it == b.out.end() ? 0 : it->second.second;
      if (!hoeffding_compatible(cfg_.alpha, edge.second, na, fb, nb)) return false;
    }
    for (const auto& [s, edge] : b.out) {
      if (a.out.count(s)) continue;
      if (!hoeffding_compatible(cfg_.alpha, 0, na, edge.second, nb)) return false;
    }
    return true;
  }

  // `blue` roots a subtree untouched by earlier merges, so recursion ends.
  bool compatible(std::size_t red, std::size_t blue) const {
    const MergeNode& a = nodes_[red];
    const MergeNode& b = nodes_[blue];
    if (!pair_compatible(a, b)) return false;
    for (const auto& [s, edge] : b.out) {
      auto it = a.out.find(s);
      if (it != a.out.end() && !compatible(it->second.first, edge.first)) return false;
    }
    return true;
  }

  void merge(std::size_t red, std::size_t blue) {
    const auto& [p, s] = parent_[blue];
    nodes_[p].out.at(s).first = red;
    fold(red, blue);
  }

  void fold(std::size_t into, std::size_t from) {
    nodes_[into].ends += nodes_[from].ends;
    for (const auto& [s, edge] : nodes_[from].out) {
      auto it = nodes_[into].out.find(s);
      if (it != nodes_[into].out.end()) {
        it->second.second += edge.second;
        fold(it->second.first, edge.first);
      } else {
        nodes_[into].out.emplace(s, edge);
        parent_[edge.first] = {into, s};
      }
    }
    nodes_[from].out.clear();
    nodes_[from].ends = 0;
  }

  std::vector<MergeNode> nodes_;
  LearnerConfig cfg_;
  std::vector<std::pair<std::size_t, Symbol>> parent_;
  std::vector<bool> red_;
  std::set<std::size_t> reds_;
};

}  // namespace detail

/// Red-blue state merging over the prefix tree with an ALERGIA-style
/// Hoeffding compatibility test. Blue states are visited in breadth-first
/// id order and merge into the lowest-id compatible red state, otherwise
/// they are promoted. The result is canonically numbered.
inline StateMachine learn(std::span<const Trace> traces, const LearnerConfig& cfg) {
  if (traces.empty()) throw EmptyTraceSet();
  validate(cfg);
  detail::RedBlueMerger merger(detail::prefix_tree(traces), cfg);
  return detail::export_machine(merger.run());
}

}  // namespace archconf
