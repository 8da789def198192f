#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "archconf/automaton.hpp"
#include "archconf/errors.hpp"
#include "archconf/events.hpp"
#include "archconf/static_model.hpp"

namespace archconf {

using Edge = std::pair<std::string, std::string>;  // (sender, receiver), directed

// Architecture nodes and directed edges extracted from one model kind.
struct ArchView {
  std::set<std::string> nodes;
  std::set<Edge> edges;

  bool operator==(const ArchView&) const = default;

  void add_edge(const std::string& sender, const std::string& receiver) {
    nodes.insert(sender);
    nodes.insert(receiver);
    edges.emplace(sender, receiver);
  }
};

enum class PresenceTag { Both, StaticOnly, DynamicOnly };

struct TaggedView {
  std::map<std::string, PresenceTag> nodes;
  std::map<Edge, PresenceTag> edges;

  bool operator==(const TaggedView&) const = default;
};

// Static: observed at runtime but missing from the static model.
// Dynamic: declared statically but never observed at runtime.
enum class NcKind { Static, Dynamic };
enum class SubjectType { Node, Edge };

struct NonConformance {
  std::string id;
  NcKind kind = NcKind::Static;
  SubjectType subject = SubjectType::Node;
  std::vector<std::string> involved;  // [name] or [sender, receiver]

  bool operator==(const NonConformance&) const = default;

  bool is_edge() const { return subject == SubjectType::Edge; }
  const std::string& sender() const { return involved.at(0); }
  const std::string& receiver() const { return involved.at(is_edge() ? 1 : 0); }
};

inline std::string_view to_string(NcKind k) { return k == NcKind::Static ? "static" : "dynamic"; }
inline std::string_view to_string(SubjectType s) { return s == SubjectType::Node ? "node" : "edge"; }
inline std::string_view to_string(PresenceTag t) {
  switch (t) {
    case PresenceTag::Both: return "both";
    case PresenceTag::StaticOnly: return "static-only";
    case PresenceTag::DynamicOnly: return "dynamic-only";
  }
  return "";
}

// Total order used for every non-conformance list: kind, subject type, names.
inline bool nc_less(const NonConformance& a, const NonConformance& b) {
  return std::tie(a.kind, a.subject, a.involved) < std::tie(b.kind, b.subject, b.involved);
}

// Stable identifier, also the page file stem. Normalized names never contain
// "--", which keeps edge ids unambiguous.
inline std::string nc_id(NcKind kind, SubjectType subject, const std::vector<std::string>& involved) {
  std::string id = std::string(to_string(kind)) + "-" + std::string(to_string(subject)) + "-";
  for (std::size_t i = 0; i < involved.size(); ++i) {
    if (i) id += "--";
    id += involved[i];
  }
  return id;
}

inline NonConformance make_nc(NcKind kind, SubjectType subject, std::vector<std::string> involved) {
  NonConformance nc;
  nc.id = nc_id(kind, subject, involved);
  nc.kind = kind;
  nc.subject = subject;
  nc.involved = std::move(involved);
  return nc;
}

inline ArchView extract_static_view(const StaticModel& m, bool include_externals) {
  ArchView v;
  for (const auto& s : m.services) v.nodes.insert(s.name);
  if (include_externals)
    for (const auto& e : m.external_entities) v.nodes.insert(e.name);
  for (const auto& f : m.flows) {
    if (v.nodes.count(f.sender) && v.nodes.count(f.receiver)) v.edges.emplace(f.sender, f.receiver);
  }
  return v;
}

// Union over all machines of the (src, dst) pairs named by transition symbols.
inline ArchView extract_dynamic_view(std::span<const StateMachine> machines) {
  ArchView v;
  for (const auto& sm : machines) {
    for (const auto& [key, t] : sm.transitions) {
      auto parts = parse_symbol(key.second);
      if (!parts) throw MalformedSymbol(sm.name, key.second);
      v.add_edge(parts->src, parts->dst);
    }
  }
  return v;
}

// Called with (pass name, percent complete) while detecting.
using DetectProgress = std::function<void(std::string_view, int)>;

struct Detection {
  TaggedView tagged;
  std::vector<NonConformance> non_conformances;
};

namespace detail {

template <typename Item, typename Emit>
void tag_pass(const std::set<Item>& stat, const std::set<Item>& dyn, std::map<Item, PresenceTag>& tags,
              Emit&& emit, std::string_view pass, const DetectProgress& progress) {
  std::set<Item> all = stat;
  all.insert(dyn.begin(), dyn.end());
  const std::size_t total = all.size();
  std::size_t done = 0;
  int last_pct = -1;
  for (const auto& item : all) {
    const bool in_s = stat.count(item) > 0;
    const bool in_d = dyn.count(item) > 0;
    const PresenceTag tag = in_s && in_d ? PresenceTag::Both : in_s ? PresenceTag::StaticOnly : PresenceTag::DynamicOnly;
    tags.emplace(item, tag);
    if (tag == PresenceTag::DynamicOnly) emit(NcKind::Static, item);
    if (tag == PresenceTag::StaticOnly) emit(NcKind::Dynamic, item);
    ++done;
    const int pct = static_cast<int>(done * 100 / total);
    if (progress && pct != last_pct) progress(pass, pct);
    last_pct = pct;
  }
  if (progress && total == 0) progress(pass, 100);
}

}  // namespace detail

/// Tags every node and edge of both views by where it is present and emits
/// one non-conformance per item missing from either side. Two passes, nodes
/// then edges; the result is sorted by nc_less.
inline Detection detect(const ArchView& static_view, const ArchView& dynamic_view,
                        const DetectProgress& progress = {}) {
  Detection d;
  detail::tag_pass(
      static_view.nodes, dynamic_view.nodes, d.tagged.nodes,
      [&](NcKind k, const std::string& n) { d.non_conformances.push_back(make_nc(k, SubjectType::Node, {n})); },
      "nodes", progress);
  detail::tag_pass(
      static_view.edges, dynamic_view.edges, d.tagged.edges,
      [&](NcKind k, const Edge& e) {
        d.non_conformances.push_back(make_nc(k, SubjectType::Edge, {e.first, e.second}));
      },
      "edges", progress);
  std::sort(d.non_conformances.begin(), d.non_conformances.end(), nc_less);
  return d;
}

inline std::size_t count_kind(std::span<const NonConformance> ncs, NcKind kind) {
  return static_cast<std::size_t>(
      std::count_if(ncs.begin(), ncs.end(), [kind](const NonConformance& nc) { return nc.kind == kind; }));
}

}  // namespace archconf
