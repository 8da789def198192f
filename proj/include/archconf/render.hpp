#pragma once

#include <map>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "archconf/automaton.hpp"
#include "archconf/detector.hpp"
#include "archconf/interpreter.hpp"

namespace archconf {

struct ReportBundle {
  std::string architecture_puml;
  std::string index_html;
  std::map<std::string, std::string> nc_pages;  // nc id -> html
};

inline std::string nc_page_filename(const std::string& id) { return "nc_" + id + ".html"; }

inline std::string summary_line(std::size_t n_static, std::size_t n_dynamic) {
  auto plural = [](std::size_t n) { return n == 1 ? "" : "s"; };
  return "Detected " + std::to_string(n_static) + " static non-conformance" + plural(n_static) + " and " +
         std::to_string(n_dynamic) + " dynamic non-conformance" + plural(n_dynamic) +
         " between implementation and deployment of the system!";
}

namespace detail {

inline std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string puml_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) out.push_back(c == '"' ? '\'' : c);
  return out + "\"";
}

// Color and line style for a presence tag.
struct Style {
  const char* color;
  const char* line;  // nullptr for solid
};

inline Style style_for(PresenceTag t) {
  switch (t) {
    case PresenceTag::StaticOnly: return {"blue", "dotted"};
    case PresenceTag::DynamicOnly: return {"orange", "dashed"};
    case PresenceTag::Both: break;
  }
  return {"black", nullptr};
}

}  // namespace detail

/// PlantUML component diagram of the tagged architecture. Items in both
/// models are black and solid, static-only items blue and dotted,
/// dynamic-only items orange and dashed.
inline std::string render_architecture_puml(const TaggedView& tv) {
  std::map<std::string, std::string> alias;
  std::map<std::string, PresenceTag> nodes = tv.nodes;
  for (const auto& [edge, tag] : tv.edges) {
    nodes.try_emplace(edge.first, PresenceTag::Both);
    nodes.try_emplace(edge.second, PresenceTag::Both);
  }
  std::string out = "@startuml\nskinparam componentStyle rectangle\n";
  std::size_t i = 0;
  for (const auto& [name, tag] : nodes) {
    const auto st = detail::style_for(tag);
    const std::string a = "c" + std::to_string(i++);
    alias.emplace(name, a);
    out += "component " + detail::puml_quote(name) + " as " + a + " #line:" + st.color;
    if (st.line) out += std::string(";line.") + st.line;
    out += std::string(";text:") + st.color + "\n";
  }
  for (const auto& [edge, tag] : tv.edges) {
    const auto st = detail::style_for(tag);
    out += alias.at(edge.first) + " -[#" + st.color;
    if (st.line) out += std::string(",") + st.line;
    out += "]-> " + alias.at(edge.second) + "\n";
  }
  out += "@enduml\n";
  return out;
}

/// PlantUML state diagram of a machine; transitions matching `highlight` are
/// drawn orange.
inline std::string render_state_machine_puml(const StateMachine& sm, const EndpointPredicate& highlight = {}) {
  std::string out = "@startuml\nhide empty description\n[*] --> S" + std::to_string(sm.initial) + "\n";
  for (const auto& [key, t] : sm.transitions) {
    bool hot = false;
    if (highlight) {
      auto p = parse_symbol(key.second);
      hot = p && highlight(p->src, p->dst);
    }
    out += "S" + std::to_string(key.first) + (hot ? " -[#orange]-> S" : " --> S") + std::to_string(t.target) +
           " : " + key.second + " (" + std::to_string(t.frequency) + ")\n";
  }
  out += "@enduml\n";
  return out;
}

/// Checks text against the PlantUML subset this library emits. Returns one
/// message per problem; empty means valid.
inline std::vector<std::string> check_puml(std::string_view text) {
  static const std::regex kComponent(
      R"re(^component "[^"\n]+" as (c\d+) #line:[a-z]+(;line\.(dotted|dashed))?;text:[a-z]+$)re");
  static const std::regex kComponentArrow(R"(^(c\d+) -\[#[a-z]+(,(dotted|dashed))?\]-> (c\d+)$)");
  static const std::regex kStateArrow(R"(^(\[\*\]|S\d+) (-->|-\[#[a-z]+\]->) S\d+( : [^\n]+)?$)");
  std::vector<std::string> problems;
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.emplace_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != "@startuml") problems.push_back("first line must be @startuml");
  if (lines.empty() || lines.back() != "@enduml") problems.push_back("last line must be @enduml");
  std::set<std::string> declared;
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
    const std::string& l = lines[i];
    std::smatch m;
    if (l.empty() || l.rfind("skinparam ", 0) == 0 || l == "hide empty description" || l.rfind("title ", 0) == 0)
      continue;
    if (std::regex_match(l, m, kComponent)) {
      if (!declared.insert(m[1].str()).second) problems.push_back("line " + std::to_string(i + 1) + ": alias redeclared");
      continue;
    }
    if (std::regex_match(l, m, kComponentArrow)) {
      if (!declared.count(m[1].str()) || !declared.count(m[4].str()))
        problems.push_back("line " + std::to_string(i + 1) + ": arrow uses undeclared alias");
      continue;
    }
    if (std::regex_match(l, kStateArrow)) continue;
    problems.push_back("line " + std::to_string(i + 1) + ": unsupported statement '" + l + "'");
  }
  return problems;
}

namespace detail {

inline constexpr std::string_view kStyle =
    "body{font-family:sans-serif;max-width:60em;margin:2em auto;line-height:1.4;color:#222}"
    "pre{background:#f4f4f4;padding:.8em;overflow-x:auto}"
    "table{border-collapse:collapse}td,th{border:1px solid #bbb;padding:.3em .6em;text-align:left}"
    ".static{color:#d9730d}.dynamic{color:#1f5fbf}.source{font-size:.9em;color:#666}";

inline std::string page_head(const std::string& title) {
  return "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>" + html_escape(title) +
         "</title>\n<style>" + std::string(kStyle) + "</style>\n</head>\n<body>\n";
}

inline std::string calls_table(const std::vector<CallSummary>& calls) {
  std::string out = "<table>\n<tr><th>Caller</th><th>Callee</th><th>Method</th><th>Path</th><th>Count</th></tr>\n";
  for (const auto& c : calls) {
    out += "<tr><td>" + html_escape(c.caller) + "</td><td>" + html_escape(c.callee) + "</td><td>" +
           html_escape(c.method) + "</td><td><code>" + html_escape(c.path_template) + "</code></td><td>" +
           std::to_string(c.count) + "</td></tr>\n";
  }
  return out + "</table>\n";
}

inline std::string flow_text(const Flow& f) {
  std::string out = html_escape(f.sender) + " &rarr; " + html_escape(f.receiver);
  if (!f.stereotypes.empty()) {
    out += " <span class=\"source\">[";
    for (std::size_t i = 0; i < f.stereotypes.size(); ++i) out += (i ? ", " : "") + html_escape(f.stereotypes[i]);
    out += "]</span>";
  }
  return out;
}

inline std::string subject_text(const NonConformance& nc) {
  return nc.is_edge() ? "edge " + nc.sender() + " → " + nc.receiver() : "node " + nc.sender();
}

inline std::string_view definition(NcKind kind) {
  return kind == NcKind::Static
             ? "A static non-conformance is a node or edge observed in the dynamic model (at runtime) but missing "
               "from the static model (the implementation)."
             : "A dynamic non-conformance is a node or edge present in the static model (the implementation) but "
               "never observed in the dynamic model (at runtime).";
}

}  // namespace detail

/// Self-contained HTML page: (1) type, definition and involved services,
/// (2) possible interpretations, (3) additional details.
inline std::string render_nc_page(const NonConformance& nc, const std::vector<Interpretation>& interps,
                                  const NcDetails& details) {
  using detail::html_escape;
  const std::string kind(to_string(nc.kind));
  std::string out = detail::page_head(kind + " non-conformance: " + nc.id);
  out += "<h1 class=\"" + kind + "\">" + html_escape(kind) + " non-conformance: " +
         html_escape(detail::subject_text(nc)) + "</h1>\n";

  out += "<section id=\"nonconformance\">\n<h2>1. Non-conformance</h2>\n";
  out += "<p><strong>Type:</strong> " + kind + " non-conformance (" + std::string(to_string(nc.subject)) + ")</p>\n";
  out += "<p><strong>Definition:</strong> " + html_escape(detail::definition(nc.kind)) + "</p>\n";
  out += "<p><strong>Involved services:</strong></p>\n<ul>\n";
  for (const auto& s : nc.involved) out += "<li>" + html_escape(s) + "</li>\n";
  out += "</ul>\n</section>\n";

  out += "<section id=\"interpretations\">\n<h2>2. Possible interpretations</h2>\n<ol>\n";
  for (const auto& i : interps) {
    out += "<li id=\"" + html_escape(i.cause_id) + "\"><h3>" + html_escape(i.title) + "</h3>\n<p>" +
           html_escape(i.body) + "</p>\n<p class=\"source\">Source: " + html_escape(i.source) + "</p></li>\n";
  }
  out += "</ol>\n</section>\n";

  out += "<section id=\"details\">\n<h2>3. Additional details</h2>\n";
  if (details.is_static()) {
    const auto& d = details.static_details();
    out += "<h3>Unexpected behavior</h3>\n";
    if (d.submachine) {
      out += "<p>Part of the state machine";
      if (!d.source_machine.empty()) out += " <code>" + html_escape(d.source_machine) + "</code>";
      out += " around the unexpected communication:</p>\n<pre class=\"puml\">" +
             html_escape(render_state_machine_puml(*d.submachine, involving(nc))) + "</pre>\n";
    } else {
      out += "<p>No state machine contains this communication.</p>\n";
    }
    out += "<h3>Most frequent calls</h3>\n";
    out += d.frequent_calls.empty() ? "<p>No calls recorded.</p>\n" : detail::calls_table(d.frequent_calls);
  } else {
    const auto& d = details.dynamic_details();
    out += "<h3>Code pointer</h3>\n";
    if (d.code_pointer) {
      out += "<p><code>" + html_escape(d.code_pointer->file) + ":" + std::to_string(d.code_pointer->line) +
             "</code></p>\n";
      if (d.code_pointer->snippet) out += "<pre>" + html_escape(*d.code_pointer->snippet) + "</pre>\n";
    } else {
      out += "<p>No traceability information available.</p>\n";
    }
    out += "<h3>Expected trigger sequence</h3>\n";
    if (d.trigger_sequence.empty()) {
      out += "<p>No triggering path from an entry point found.</p>\n";
    } else {
      out += "<ol>\n";
      for (const auto& f : d.trigger_sequence) out += "<li>" + detail::flow_text(f) + "</li>\n";
      out += "</ol>\n";
    }
    out += "<h3>Call details</h3>\n";
    out += d.call_details.empty() ? "<p>No call details available.</p>\n" : detail::calls_table(d.call_details);
  }
  if (!details.service_machines.empty()) {
    out += "<h3>State machines of the involved services</h3>\n";
    for (const auto& sm : details.service_machines) {
      out += "<details><summary>" + html_escape(sm.name) + " (" + std::to_string(sm.state_count()) + " states, " +
             std::to_string(sm.transition_count()) + " transitions)</summary>\n<pre class=\"puml\">" +
             html_escape(render_state_machine_puml(sm)) + "</pre></details>\n";
    }
  }
  out += "</section>\n<p><a href=\"index.html\">Back to overview</a></p>\n</body>\n</html>\n";
  return out;
}

inline std::string render_index(const TaggedView& tv, const std::vector<NonConformance>& ncs) {
  using detail::html_escape;
  const std::size_t n_static = count_kind(ncs, NcKind::Static);
  const std::size_t n_dynamic = count_kind(ncs, NcKind::Dynamic);
  std::string out = detail::page_head("Conformance report");
  out += "<h1>Conformance report</h1>\n<p>" + html_escape(summary_line(n_static, n_dynamic)) + "</p>\n";
  if (ncs.empty()) {
    out += "<p>The system is fully conformant: every node and edge appears in both models.</p>\n";
  } else {
    out += "<ul>\n<li class=\"static\">" + std::to_string(n_static) + " static</li>\n<li class=\"dynamic\">" +
           std::to_string(n_dynamic) + " dynamic</li>\n</ul>\n";
    out += "<table>\n<tr><th>Kind</th><th>Subject</th><th>Involved services</th><th>Page</th></tr>\n";
    for (const auto& nc : ncs) {
      std::string involved;
      for (std::size_t i = 0; i < nc.involved.size(); ++i) involved += (i ? " → " : "") + nc.involved[i];
      out += "<tr><td class=\"" + std::string(to_string(nc.kind)) + "\">" + std::string(to_string(nc.kind)) +
             "</td><td>" + std::string(to_string(nc.subject)) + "</td><td>" + html_escape(involved) +
             "</td><td><a href=\"" + html_escape(nc_page_filename(nc.id)) + "\">" + html_escape(nc.id) +
             "</a></td></tr>\n";
    }
    out += "</table>\n";
  }
  out += "<h2>Architecture</h2>\n<p>Black: in both models. Static-only items are dotted, dynamic-only items "
         "dashed.</p>\n<pre class=\"puml\">" +
         html_escape(render_architecture_puml(tv)) + "</pre>\n</body>\n</html>\n";
  return out;
}

}  // namespace archconf
