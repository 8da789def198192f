#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "archconf/detector.hpp"
#include "archconf/errors.hpp"
#include "archconf/random.hpp"
#include "archconf/static_model.hpp"
#include "json.hpp"

namespace archconf {

struct ScenarioSpec {
  std::size_t n_services = 5;
  std::size_t n_edges = 6;
  std::size_t n_injected_static_nc = 0;
  std::size_t n_injected_dynamic_nc = 0;
  std::size_t n_events = 500;
  std::uint64_t rng_seed = 1;
};

struct GroundTruth {
  std::vector<NonConformance> expected;  // sorted by nc_less
  std::size_t induced_node_nc = 0;
};

struct Scenario {
  StaticModel model;
  std::string static_model_json;
  std::string event_log;  // JSON Lines
  GroundTruth truth;
};

inline constexpr std::int64_t kScenarioStartTs = 1'700'000'000'000;
inline constexpr std::string_view kScenarioEntry = "gateway";
inline constexpr std::string_view kScenarioUser = "user";

namespace detail {

inline std::vector<std::string> scenario_names(std::size_t n) {
  static const char* const kPool[] = {"gateway", "order", "catalog", "payment", "customer", "inventory",
                                      "shipping", "auth", "notification", "billing", "review", "recommendation",
                                      "search", "cart", "pricing", "user-profile", "analytics", "config",
                                      "mail", "report", "warehouse", "loyalty", "media", "audit"};
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i)
    names.push_back(i < std::size(kPool) ? kPool[i] : "service-" + std::to_string(i));
  return names;
}

struct Endpoint {
  std::string method;
  std::string path;  // concrete prefix; "/{n}" suffix added when has_id
  bool has_id;
};

inline std::string endpoint_template(const Endpoint& e) { return e.path + (e.has_id ? "/{}" : ""); }

}  // namespace detail

/// Builds a seeded random service graph, derives a static model with injected
/// omissions and additions, and an event log exercising every runtime edge at
/// least three times. GroundTruth lists exactly what detection must report.
inline Scenario generate(const ScenarioSpec& spec) {
  const std::size_t n = spec.n_services;
  if (n < 2) throw InfeasibleSpec("need at least two services");
  const std::size_t max_edges = n * (n - 1);
  if (spec.n_edges > max_edges) throw InfeasibleSpec("too many edges for the service count");
  if (spec.n_edges + 1 < n) throw InfeasibleSpec("n_edges too small to connect every service");
  if (spec.n_injected_static_nc > spec.n_edges || spec.n_injected_dynamic_nc > spec.n_edges)
    throw InfeasibleSpec("injected counts must not exceed n_edges");
  if (spec.n_edges + spec.n_injected_dynamic_nc > max_edges)
    throw InfeasibleSpec("no room for the requested static-only edges");

  Rng rng(spec.rng_seed);
  const auto names = detail::scenario_names(n);

  // Runtime graph: a spanning tree rooted at the gateway plus random extras.
  std::set<std::pair<std::size_t, std::size_t>> runtime;
  for (std::size_t i = 1; i < n; ++i) runtime.emplace(uniform_index(rng, i), i);
  std::vector<std::pair<std::size_t, std::size_t>> free_pairs;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && !runtime.count({a, b})) free_pairs.emplace_back(a, b);
  shuffle_in_place(free_pairs, rng);
  std::size_t next_free = 0;
  while (runtime.size() < spec.n_edges) runtime.insert(free_pairs[next_free++]);

  std::vector<std::pair<std::size_t, std::size_t>> runtime_list(runtime.begin(), runtime.end());
  shuffle_in_place(runtime_list, rng);
  const std::set<std::pair<std::size_t, std::size_t>> omitted(runtime_list.begin(),
                                                              runtime_list.begin() + spec.n_injected_static_nc);
  const std::vector<std::pair<std::size_t, std::size_t>> unexercised(
      free_pairs.begin() + next_free, free_pairs.begin() + next_free + spec.n_injected_dynamic_nc);

  static const char* const kMethods[] = {"GET", "GET", "POST", "PUT", "DELETE"};
  static const char* const kResources[] = {"items", "status", "records", "details", "events", "summary"};
  std::map<std::pair<std::size_t, std::size_t>, std::vector<detail::Endpoint>> endpoints;
  auto make_endpoints = [&](std::pair<std::size_t, std::size_t> e) {
    auto& eps = endpoints[e];
    const std::size_t count = 1 + uniform_index(rng, 2);
    for (std::size_t i = 0; i < count; ++i) {
      detail::Endpoint ep{kMethods[uniform_index(rng, std::size(kMethods))],
                          "/" + names[e.second] + "/" + kResources[uniform_index(rng, std::size(kResources))],
                          uniform_index(rng, 2) == 0};
      if (std::none_of(eps.begin(), eps.end(), [&](const detail::Endpoint& x) {
            return x.method == ep.method && x.path == ep.path && x.has_id == ep.has_id;
          }))
        eps.push_back(ep);
    }
  };
  for (const auto& e : runtime) make_endpoints(e);
  for (const auto& e : unexercised) make_endpoints(e);

  // Static model.
  std::set<std::pair<std::size_t, std::size_t>> static_edges;
  for (const auto& e : runtime)
    if (!omitted.count(e)) static_edges.insert(e);
  static_edges.insert(unexercised.begin(), unexercised.end());
  std::set<std::size_t> declared{0};
  for (const auto& [a, b] : static_edges) {
    declared.insert(a);
    declared.insert(b);
  }

  Scenario sc;
  for (std::size_t s : declared) {
    sc.model.services.push_back(ServiceNode{names[s],
                                            {s == 0 ? "gateway" : "internal"},
                                            false,
                                            Traceability{names[s] + "/docker-compose.yml", 1 + static_cast<std::int64_t>(s) * 7, std::nullopt}});
  }
  sc.model.external_entities.push_back(
      ServiceNode{std::string(kScenarioUser), {"user"}, true, std::nullopt});
  sc.model.flows.push_back(Flow{std::string(kScenarioUser), names[0], {"entrypoint", "GET /"}, std::nullopt});
  for (const auto& e : static_edges) {
    const auto& ep = endpoints.at(e).front();
    const std::int64_t line = 20 + static_cast<std::int64_t>(uniform_index(rng, 180));
    sc.model.flows.push_back(Flow{
        names[e.first],
        names[e.second],
        {"restful_http", ep.method + " " + detail::endpoint_template(ep)},
        Traceability{names[e.first] + "/src/main/java/clients/" + names[e.second] + "Client.java", line,
                     "client." + std::string(ep.method == "GET" ? "get" : "send") + "(\"http://" + names[e.second] +
                         ep.path + "\");"}});
  }
  sc.static_model_json = serialize_static_model(sc.model);

  // Workflows: one per runtime edge (shortest gateway path + the edge +
  // a short random continuation) plus a few free random walks.
  std::map<std::size_t, std::vector<std::size_t>> succ;
  for (const auto& [a, b] : runtime) succ[a].push_back(b);
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> bfs_parent;
  {
    std::deque<std::size_t> queue{0};
    std::set<std::size_t> seen{0};
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t w : succ[v])
        if (seen.insert(w).second) {
          bfs_parent[w] = {v, w};
          queue.push_back(w);
        }
    }
  }
  struct Call {
    std::pair<std::size_t, std::size_t> edge;
    std::size_t endpoint;
  };
  using Workflow = std::vector<Call>;
  auto call_on = [&](std::pair<std::size_t, std::size_t> e) {
    return Call{e, uniform_index(rng, endpoints.at(e).size())};
  };
  auto random_walk = [&](Workflow& wf, std::size_t from, std::size_t steps) {
    for (std::size_t i = 0; i < steps && !succ[from].empty(); ++i) {
      const std::size_t to = succ[from][uniform_index(rng, succ[from].size())];
      wf.push_back(call_on({from, to}));
      from = to;
    }
  };
  std::vector<Workflow> coverage;
  for (const auto& e : runtime) {
    Workflow wf;
    std::vector<std::pair<std::size_t, std::size_t>> prefix;
    for (std::size_t v = e.first; v != 0; v = bfs_parent.at(v).first) prefix.push_back(bfs_parent.at(v));
    for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) wf.push_back(call_on(*it));
    wf.push_back(call_on(e));
    random_walk(wf, e.second, uniform_index(rng, 3));
    coverage.push_back(std::move(wf));
  }
  std::vector<Workflow> pool = coverage;
  for (std::size_t i = 0; i < n; ++i) {
    Workflow wf;
    random_walk(wf, 0, 1 + uniform_index(rng, 6));
    if (!wf.empty()) pool.push_back(std::move(wf));
  }

  std::vector<Workflow> sessions;
  std::size_t total = 0;
  for (const auto& wf : coverage)
    for (int r = 0; r < 3; ++r) {
      sessions.push_back(wf);
      total += wf.size();
    }
  if (total > spec.n_events)
    throw InfeasibleSpec("n_events=" + std::to_string(spec.n_events) + " cannot exercise every edge three times (needs " +
                         std::to_string(total) + ")");
  shuffle_in_place(pool, rng);
  std::vector<double> cumulative;
  double acc = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) cumulative.push_back(acc += 1.0 / static_cast<double>(i + 1));
  while (total < spec.n_events) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
    const auto idx = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    Workflow wf = pool[std::min(idx, pool.size() - 1)];
    if (total + wf.size() > spec.n_events) wf.resize(spec.n_events - total);
    total += wf.size();
    sessions.push_back(std::move(wf));
  }
  shuffle_in_place(sessions, rng);

  std::int64_t ts = kScenarioStartTs;
  for (const auto& wf : sessions) {
    ts += static_cast<std::int64_t>(uniform_between(rng, 1500, 4000));
    for (std::size_t i = 0; i < wf.size(); ++i) {
      if (i) ts += static_cast<std::int64_t>(uniform_between(rng, 5, 300));
      const auto& ep = endpoints.at(wf[i].edge)[wf[i].endpoint];
      std::string path = ep.path;
      if (ep.has_id) path += "/" + std::to_string(uniform_between(rng, 1, 99999));
      nlohmann::ordered_json line;
      line["ts"] = ts;
      line["src"] = names[wf[i].edge.first];
      line["dst"] = names[wf[i].edge.second];
      line["method"] = ep.method;
      line["path"] = path;
      line["status"] = 200;
      sc.event_log += line.dump() + "\n";
    }
  }

  // Ground truth, assembled from the injections.
  for (const auto& [a, b] : omitted)
    sc.truth.expected.push_back(make_nc(NcKind::Static, SubjectType::Edge, {names[a], names[b]}));
  for (const auto& [a, b] : unexercised)
    sc.truth.expected.push_back(make_nc(NcKind::Dynamic, SubjectType::Edge, {names[a], names[b]}));
  for (std::size_t s = 0; s < n; ++s) {
    if (!declared.count(s)) {
      sc.truth.expected.push_back(make_nc(NcKind::Static, SubjectType::Node, {names[s]}));
      ++sc.truth.induced_node_nc;
    }
  }
  std::sort(sc.truth.expected.begin(), sc.truth.expected.end(), nc_less);
  return sc;
}

inline nlohmann::ordered_json nc_json(const NonConformance& nc) {
  nlohmann::ordered_json j;
  j["id"] = nc.id;
  j["kind"] = to_string(nc.kind);
  j["subject"] = to_string(nc.subject);
  j["involved"] = nc.involved;
  return j;
}

inline std::string ground_truth_json(const GroundTruth& gt) {
  nlohmann::ordered_json doc;
  doc["expected"] = nlohmann::ordered_json::array();
  for (const auto& nc : gt.expected) doc["expected"].push_back(nc_json(nc));
  doc["induced_node_nc"] = gt.induced_node_nc;
  return doc.dump(2) + "\n";
}

}  // namespace archconf
