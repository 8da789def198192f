#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "archconf/errors.hpp"
#include "archconf/names.hpp"
#include "json.hpp"

namespace archconf {

struct Traceability {
  std::string file;
  std::int64_t line = 1;
  std::optional<std::string> snippet;

  bool operator==(const Traceability&) const = default;
};

struct ServiceNode {
  std::string name;
  std::vector<std::string> stereotypes;
  bool is_external = false;
  std::optional<Traceability> traceability;

  bool operator==(const ServiceNode&) const = default;
};

struct Flow {
  std::string sender;
  std::string receiver;
  std::vector<std::string> stereotypes;
  std::optional<Traceability> traceability;

  bool operator==(const Flow&) const = default;
};

// Dataflow diagram extracted from source code. Names are normalized and every
// flow endpoint resolves to a declared node.
struct StaticModel {
  std::vector<ServiceNode> services;
  std::vector<ServiceNode> external_entities;
  std::vector<Flow> flows;

  bool operator==(const StaticModel&) const = default;

  const ServiceNode* find_node(std::string_view name) const {
    for (const auto& s : services)
      if (s.name == name) return &s;
    for (const auto& e : external_entities)
      if (e.name == name) return &e;
    return nullptr;
  }

  // First declared flow sender -> receiver, if any.
  const Flow* find_flow(std::string_view sender, std::string_view receiver) const {
    for (const auto& f : flows)
      if (f.sender == sender && f.receiver == receiver) return &f;
    return nullptr;
  }

  bool is_external(std::string_view name) const {
    const ServiceNode* n = find_node(name);
    return n != nullptr && n->is_external;
  }
};

inline constexpr std::string_view kSelfCallStereotype = "self-call";

namespace detail {

using nlohmann::json;

inline const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw MissingField(path + "." + key);
  return *it;
}

inline std::string require_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw InvalidField(path + "." + key, "expected string");
  return v.get<std::string>();
}

inline std::vector<std::string> require_string_list(const json& obj, const char* key,
                                                    const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw InvalidField(path + "." + key, "expected array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string())
      throw InvalidField(path + "." + key + "[" + std::to_string(i) + "]", "expected string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

inline std::optional<Traceability> parse_traceability(const json& obj, const std::string& path) {
  auto it = obj.find("traceability");
  if (it == obj.end() || it->is_null()) return std::nullopt;
  const std::string tpath = path + ".traceability";
  if (!it->is_object()) throw InvalidField(tpath, "expected object");
  Traceability t;
  t.file = require_string(*it, "file", tpath);
  const json& line = require(*it, "line", tpath);
  if (!line.is_number_integer()) throw InvalidField(tpath + ".line", "expected integer");
  t.line = line.get<std::int64_t>();
  if (t.line < 1) throw InvalidField(tpath + ".line", "must be >= 1");
  if (auto s = it->find("snippet"); s != it->end() && !s->is_null()) {
    if (!s->is_string()) throw InvalidField(tpath + ".snippet", "expected string");
    t.snippet = s->get<std::string>();
  }
  return t;
}

inline std::string normalized_at(const std::string& raw, const std::string& path) {
  try {
    return normalize_name(raw);
  } catch (const EmptyAfterNormalization&) {
    throw InvalidField(path, "name '" + raw + "' is empty after normalization");
  }
}

inline std::vector<ServiceNode> parse_nodes(const json& doc, const char* key, bool external) {
  const json& arr = require(doc, key, "$");
  if (!arr.is_array()) throw InvalidField(std::string("$.") + key, "expected array");
  std::vector<ServiceNode> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = std::string("$.") + key + "[" + std::to_string(i) + "]";
    if (!arr[i].is_object()) throw InvalidField(path, "expected object");
    ServiceNode n;
    n.name = normalized_at(require_string(arr[i], "name", path), path + ".name");
    n.stereotypes = require_string_list(arr[i], "stereotypes", path);
    n.is_external = external;
    n.traceability = parse_traceability(arr[i], path);
    out.push_back(std::move(n));
  }
  return out;
}

}  // namespace detail

/// Parses and validates a static model document. Unknown fields are ignored.
inline StaticModel parse_static_model(std::string_view json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw MalformedJson(e.what());
  }
  if (!doc.is_object()) throw MalformedJson("top-level value must be an object");

  StaticModel m;
  m.services = detail::parse_nodes(doc, "services", false);
  m.external_entities = detail::parse_nodes(doc, "external_entities", true);

  std::set<std::string> declared;
  for (const auto* group : {&m.services, &m.external_entities}) {
    for (const auto& n : *group) {
      if (!declared.insert(n.name).second) throw DuplicateService(n.name);
    }
  }

  const json& flows = detail::require(doc, "information_flows", "$");
  if (!flows.is_array()) throw InvalidField("$.information_flows", "expected array");
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const std::string path = "$.information_flows[" + std::to_string(i) + "]";
    if (!flows[i].is_object()) throw InvalidField(path, "expected object");
    Flow f;
    f.sender = detail::normalized_at(detail::require_string(flows[i], "sender", path), path + ".sender");
    f.receiver =
        detail::normalized_at(detail::require_string(flows[i], "receiver", path), path + ".receiver");
    f.stereotypes = detail::require_string_list(flows[i], "stereotypes", path);
    f.traceability = detail::parse_traceability(flows[i], path);
    if (!declared.count(f.sender)) throw UnknownEndpoint(i, f.sender);
    if (!declared.count(f.receiver)) throw UnknownEndpoint(i, f.receiver);
    if (f.sender == f.receiver) {
      bool self_call = false;
      for (const auto& s : f.stereotypes) self_call = self_call || s == kSelfCallStereotype;
      if (!self_call) throw InvalidField(path, "sender equals receiver without 'self-call' stereotype");
    }
    m.flows.push_back(std::move(f));
  }
  return m;
}

namespace detail {

inline nlohmann::ordered_json traceability_json(const Traceability& t) {
  nlohmann::ordered_json j;
  j["file"] = t.file;
  j["line"] = t.line;
  if (t.snippet) j["snippet"] = *t.snippet;
  return j;
}

inline nlohmann::ordered_json node_json(const ServiceNode& n) {
  nlohmann::ordered_json j;
  j["name"] = n.name;
  j["stereotypes"] = n.stereotypes;
  if (n.traceability) j["traceability"] = traceability_json(*n.traceability);
  return j;
}

}  // namespace detail

// Canonical serializer: fixed key order, declaration order of elements kept,
// two-space indentation, trailing newline.
inline std::string serialize_static_model(const StaticModel& m) {
  nlohmann::ordered_json doc;
  doc["services"] = nlohmann::ordered_json::array();
  for (const auto& s : m.services) doc["services"].push_back(detail::node_json(s));
  doc["external_entities"] = nlohmann::ordered_json::array();
  for (const auto& e : m.external_entities) doc["external_entities"].push_back(detail::node_json(e));
  doc["information_flows"] = nlohmann::ordered_json::array();
  for (const auto& f : m.flows) {
    nlohmann::ordered_json j;
    j["sender"] = f.sender;
    j["receiver"] = f.receiver;
    j["stereotypes"] = f.stereotypes;
    if (f.traceability) j["traceability"] = detail::traceability_json(*f.traceability);
    doc["information_flows"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

}  // namespace archconf
