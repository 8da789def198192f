#pragma once

// Fixed inputs for the frozen page renderings in tests/golden.

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "archconf/interpreter.hpp"
#include "archconf/render.hpp"

namespace archconf::testing {

inline StateMachine fixture_machine() {
  StateMachine sm;
  sm.name = "_global";
  sm.add_transition(0, "gateway→order:GET /orders/{}", 1, 12);
  sm.add_transition(1, "order→catalog:GET /items/{}", 2, 9);
  sm.add_transition(1, "order→payment:POST /charge", 3, 3);
  sm.add_transition(2, "order→catalog:GET /items/{}", 2, 4);
  return sm;
}

inline TaggedView fixture_tagged_view() {
  TaggedView tv;
  tv.nodes = {{"catalog", PresenceTag::Both}, {"gateway", PresenceTag::Both}, {"legacy", PresenceTag::StaticOnly},
              {"order", PresenceTag::Both},   {"payment", PresenceTag::Both}, {"tracing", PresenceTag::DynamicOnly}};
  tv.edges = {{{"gateway", "order"}, PresenceTag::Both},
              {{"order", "catalog"}, PresenceTag::DynamicOnly},
              {{"order", "payment"}, PresenceTag::StaticOnly},
              {{"order", "legacy"}, PresenceTag::StaticOnly},
              {{"order", "tracing"}, PresenceTag::DynamicOnly},
              {{"payment", "payment"}, PresenceTag::Both}};
  return tv;
}

inline std::string fixture_static_page() {
  const NonConformance nc = make_nc(NcKind::Static, SubjectType::Edge, {"order", "catalog"});
  NcDetails details;
  const StateMachine sm = fixture_machine();
  StaticNcDetails d;
  d.submachine = unexpected_behavior_submachine(sm, "order", "catalog");
  d.source_machine = sm.name;
  d.frequent_calls = most_frequent_calls(sm, "order", "catalog");
  details.details = d;
  StateMachine order = sm;
  order.name = "order";
  details.service_machines.push_back(order);
  return render_nc_page(nc, interpretations_for(nc.kind), details);
}

inline std::string fixture_dynamic_page() {
  const NonConformance nc = make_nc(NcKind::Dynamic, SubjectType::Edge, {"order", "payment"});
  StaticModel m;
  m.external_entities = {{"user", {}, true, std::nullopt}};
  m.services = {{"gateway", {}, false, std::nullopt},
                {"order", {}, false, std::nullopt},
                {"payment", {}, false, std::nullopt}};
  m.flows = {{"user", "gateway", {"restful_http"}, std::nullopt},
             {"gateway", "order", {"restful_http", "GET /orders/42"}, Traceability{"gateway/routes.yml", 14, {}}},
             {"order", "payment", {"restful_http", "POST /charge"},
              Traceability{"order/src/Checkout.java", 88, std::string("client.post(\"/charge\", body);")}}};
  NcDetails details;
  details.details = dynamic_nc_details(m, nc);
  return render_nc_page(nc, interpretations_for(nc.kind), details);
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Set ARCHCONF_UPDATE_GOLDEN=1 to rewrite a missing or outdated file.
inline bool matches_golden(const std::string& name, const std::string& actual) {
  const std::string path = std::string(ARCHCONF_GOLDEN_DIR) + "/" + name;
  if (std::getenv("ARCHCONF_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << actual;
    return true;
  }
  return read_text(path) == actual;
}

}  // namespace archconf::testing
