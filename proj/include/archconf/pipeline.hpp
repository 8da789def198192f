#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "archconf/automaton.hpp"
#include "archconf/config.hpp"
#include "archconf/detector.hpp"
#include "archconf/events.hpp"
#include "archconf/interpreter.hpp"
#include "archconf/learner.hpp"
#include "archconf/render.hpp"
#include "archconf/static_model.hpp"

namespace archconf {

// Traces of every configured scope, keyed by scope (kGlobalScopeKey or a
// service name).
inline std::map<std::string, std::vector<Trace>> traces_by_scope(const std::vector<HttpEvent>& events,
                                                                  const Config& cfg,
                                                                  const std::string& origin_file = "") {
  std::map<std::string, std::vector<Trace>> out;
  if (cfg.trace_scope != TraceScopes::PerService)
    out.merge(extract_traces(events, cfg.session_gap_ms, TraceScope::Global, origin_file));
  if (cfg.trace_scope != TraceScopes::Global)
    out.merge(extract_traces(events, cfg.session_gap_ms, TraceScope::PerService, origin_file));
  return out;
}

inline std::map<std::string, StateMachine> learn_machines(const std::map<std::string, std::vector<Trace>>& scopes,
                                                          const Config& cfg) {
  std::map<std::string, StateMachine> out;
  for (const auto& [scope, traces] : scopes) {
    if (traces.empty()) continue;
    StateMachine sm = learn(traces, cfg.learner());
    sm.name = scope;
    out.emplace(scope, std::move(sm));
  }
  return out;
}

struct Analysis {
  Detection detection;
  std::vector<NcDetails> details;  // parallel to detection.non_conformances
  ReportBundle bundle;
};

inline NcDetails details_for(const NonConformance& nc, const StaticModel& model,
                             const std::vector<StateMachine>& machines, const Config& cfg) {
  NcDetails out;
  const auto pred = involving(nc);
  if (nc.kind == NcKind::Static) {
    StaticNcDetails d;
    const StateMachine* source = nullptr;
    for (const auto& sm : machines) {
      if (!has_transition_matching(sm, pred)) continue;
      if (source == nullptr || sm.name == kGlobalScopeKey) source = &sm;
      if (sm.name == kGlobalScopeKey) break;
    }
    if (source) {
      d.submachine = unexpected_behavior_submachine(*source, pred, nc.sender(), nc.receiver());
      d.source_machine = source->name;
      d.frequent_calls = most_frequent_calls(*source, pred, cfg.top_n_calls);
    }
    out.details = std::move(d);
  } else {
    out.details = dynamic_nc_details(model, nc);
  }
  const std::set<std::string> involved(nc.involved.begin(), nc.involved.end());
  for (const auto& sm : machines)
    if (involved.count(sm.name)) out.service_machines.push_back(sm);
  return out;
}

/// Detection, interpretation and rendering for already-loaded models.
/// `machines` should be ordered by scope name for reproducible output.
inline Analysis analyze(const StaticModel& model, const std::vector<StateMachine>& machines, const Config& cfg,
                        const DetectProgress& progress = {}) {
  Analysis a;
  a.detection = detect(extract_static_view(model, cfg.include_externals), extract_dynamic_view(machines), progress);
  for (const auto& nc : a.detection.non_conformances) a.details.push_back(details_for(nc, model, machines, cfg));
  a.bundle.architecture_puml = render_architecture_puml(a.detection.tagged);
  a.bundle.index_html = render_index(a.detection.tagged, a.detection.non_conformances);
  for (std::size_t i = 0; i < a.details.size(); ++i) {
    const auto& nc = a.detection.non_conformances[i];
    a.bundle.nc_pages.emplace(nc.id, render_nc_page(nc, interpretations_for(nc.kind), a.details[i]));
  }
  return a;
}

}  // namespace archconf
