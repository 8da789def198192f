#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "archconf/config.hpp"
#include "archconf/evaluator.hpp"
#include "archconf/pipeline.hpp"
#include "archconf/scenario.hpp"

namespace archconf::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNonConformant = 3;  // only with --fail-on-nc

inline constexpr const char* kEventLogName = "events.jsonl";
inline constexpr std::size_t kEvaluationFolds = 10;
inline constexpr std::uint64_t kEvaluationSeed = 1;

struct Options {
  std::string static_model_path;
  std::string dynamic_models_path;
  std::string output_path;
  std::string config_path;
  std::string scenario_path;
  bool evaluate = false;
  bool fail_on_nc = false;
};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to a sibling temp file and renames it over the target.
inline void write_atomic(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, p);
}

struct DynamicModels {
  std::vector<StateMachine> machines;  // ordered by scope name
  std::optional<std::vector<Trace>> global_traces;
  std::map<std::string, StateMachine> learned;
};

inline DynamicModels load_dynamic_models(const fs::path& dir, const Config& cfg) {
  if (!fs::is_directory(dir)) throw InputError("dynamic models path is not a directory: " + dir.string());
  std::map<std::string, StateMachine> by_scope;
  DynamicModels out;

  const fs::path log = dir / kEventLogName;
  if (fs::is_regular_file(log)) {
    const auto events = parse_event_log(read_file(log));
    auto scopes = traces_by_scope(events, cfg, kEventLogName);
    out.learned = learn_machines(scopes, cfg);
    by_scope = out.learned;
    if (auto it = scopes.find(std::string(kGlobalScopeKey)); it != scopes.end()) out.global_traces = it->second;
    else if (!events.empty())
      out.global_traces = extract_traces(events, cfg.session_gap_ms, TraceScope::Global, kEventLogName)
                              .at(std::string(kGlobalScopeKey));
  }

  std::vector<fs::path> dots;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".dot") dots.push_back(entry.path());
  std::sort(dots.begin(), dots.end());
  for (const auto& p : dots) {
    const std::string scope = p.stem().string();
    try {
      by_scope.insert_or_assign(scope, parse_state_machine(read_file(p), scope));
    } catch (const InputError& e) {
      throw InputError(p.filename().string() + ": " + e.what());
    }
  }
  if (by_scope.empty() && !fs::is_regular_file(log))
    throw InputError("no *.dot state machines or " + std::string(kEventLogName) + " in " + dir.string());
  for (auto& [scope, sm] : by_scope) out.machines.push_back(std::move(sm));
  return out;
}

inline void write_bundle(const fs::path& dir, const ReportBundle& bundle,
                         const std::map<std::string, StateMachine>& learned) {
  fs::create_directories(dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("nc_", 0) == 0 && entry.path().extension() == ".html") {
      const std::string id = name.substr(3, name.size() - 3 - 5);
      if (!bundle.nc_pages.count(id)) fs::remove(entry.path());
    }
  }
  write_atomic(dir / "architecture.puml", bundle.architecture_puml);
  write_atomic(dir / "index.html", bundle.index_html);
  for (const auto& [id, html] : bundle.nc_pages) write_atomic(dir / nc_page_filename(id), html);
  for (const auto& [scope, sm] : learned) write_atomic(dir / "models" / (scope + ".dot"), serialize_state_machine(sm));
}

inline int run_scenario(const Options& opt, std::ostream& out) {
  const ScenarioSpec spec = parse_scenario_spec(read_file(opt.scenario_path));
  const Scenario sc = generate(spec);
  write_atomic(opt.static_model_path, sc.static_model_json);
  write_atomic(fs::path(opt.dynamic_models_path) / kEventLogName, sc.event_log);
  write_atomic(fs::path(opt.output_path) / "ground_truth.json", ground_truth_json(sc.truth));
  out << "Generated scenario with " << spec.n_services << " services and " << spec.n_events << " events ("
      << sc.truth.expected.size() << " expected non-conformances).\n";
  return kExitOk;
}

inline int run_analysis(const Options& opt, std::ostream& out, std::ostream& err) {
  out << "Reading configuration file...\n";
  const Config cfg = opt.config_path.empty() ? Config{} : parse_config(read_file(opt.config_path));

  out << "Processing static model...\n";
  StaticModel model;
  try {
    model = parse_static_model(read_file(opt.static_model_path));
  } catch (const InputError& e) {
    throw InputError(opt.static_model_path + ": " + e.what());
  }

  out << "Processing dynamic model...\n";
  DynamicModels dyn = load_dynamic_models(opt.dynamic_models_path, cfg);

  const Analysis a = analyze(model, dyn.machines, cfg, [&](std::string_view, int pct) {
    if (pct == 100) out << "Detecting non-conformances: 100\n";
  });
  const auto& ncs = a.detection.non_conformances;
  const std::size_t n_static = count_kind(ncs, NcKind::Static);
  const std::size_t n_dynamic = count_kind(ncs, NcKind::Dynamic);
  out << summary_line(n_static, n_dynamic) << "\n";
  out << "Generating non-conformance interpretations...\n";
  out << "Generating non-conformance visualizations...\n";
  out << "Generating interpretation visualizations...\n";
  write_bundle(opt.output_path, a.bundle, dyn.learned);

  if (opt.evaluate) {
    if (!dyn.global_traces) {
      err << "warning: --evaluate needs " << kEventLogName << "; skipping evaluation\n";
    } else {
      out << "Evaluating dynamic model (" << kEvaluationFolds << "-fold cross-validation)...\n";
      const EvalMetrics m = evaluate(*dyn.global_traces, cfg.learner(), kEvaluationFolds, kEvaluationSeed);
      const std::string table = metrics_table({m});
      out << table;
      write_atomic(fs::path(opt.output_path) / "evaluation.txt", table);
      write_atomic(fs::path(opt.output_path) / "evaluation.json", metrics_json(m).dump(2) + "\n");
    }
  }
  if (opt.fail_on_nc && !ncs.empty()) return kExitNonConformant;
  return kExitOk;
}

/// Entry point shared by the executable and the tests. args[0] is the
/// program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Conformance analysis between a static architecture model and observed runtime behavior",
               args.empty() ? "archconf" : args.front()};
  Options opt;
  app.add_option("--static_model_path", opt.static_model_path, "Static model (dataflow diagram) JSON")->required();
  app.add_option("--dynamic_models_path", opt.dynamic_models_path,
                 "Directory with *.dot state machines and/or events.jsonl")
      ->required();
  app.add_option("--output_path", opt.output_path, "Report output directory")->required();
  app.add_option("--config", opt.config_path, "Configuration file (key = value lines)");
  app.add_flag("--evaluate", opt.evaluate, "Also cross-validate the learned model when a log is present");
  app.add_option("--scenario", opt.scenario_path, "Generate a synthetic scenario from this description file instead");
  app.add_flag("--fail-on-nc", opt.fail_on_nc, "Exit with code 3 when non-conformances are found");

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitInvalidInput;
  }

  try {
    return opt.scenario_path.empty() ? run_analysis(opt, out, err) : run_scenario(opt, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace archconf::cli
