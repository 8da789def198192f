#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "archconf/automaton.hpp"
#include "archconf/errors.hpp"
#include "archconf/events.hpp"
#include "archconf/learner.hpp"
#include "archconf/random.hpp"
#include "json.hpp"

namespace archconf {

struct EvalMetrics {
  double avg_nodes = 0;
  double avg_edges = 0;
  double recall = 0;
  double specificity = 0;
  double balanced_accuracy = 0;
};

using TraceSet = std::set<std::vector<Symbol>>;

inline std::vector<Symbol> alphabet_of(std::span<const Trace> traces) {
  std::set<Symbol> symbols;
  for (const auto& t : traces) symbols.insert(t.symbols.begin(), t.symbols.end());
  return {symbols.begin(), symbols.end()};
}

inline constexpr int kMutationRetries = 16;

/// Replaces one uniformly chosen position with a different, uniformly chosen
/// alphabet symbol. Mutants found in `exclude` are re-drawn a bounded number
/// of times, after which positions are scanned from the chosen one onwards.
inline Trace mutate_trace(const Trace& trace, std::span<const Symbol> alphabet, std::uint64_t rng_seed,
                          const TraceSet& exclude = {}) {
  const std::vector<Symbol> symbols = [&] {
    std::set<Symbol> s(alphabet.begin(), alphabet.end());
    return std::vector<Symbol>(s.begin(), s.end());
  }();
  if (symbols.size() < 2) throw AlphabetTooSmall();
  if (trace.symbols.empty()) throw Error("cannot mutate an empty trace");

  Rng rng(rng_seed);
  Trace mutant = trace;
  const std::size_t len = trace.symbols.size();
  const std::size_t pos = uniform_index(rng, len);
  auto draw_other = [&](const Symbol& current) {
    const auto it = std::lower_bound(symbols.begin(), symbols.end(), current);
    if (it == symbols.end() || *it != current) return symbols[uniform_index(rng, symbols.size())];
    const auto self = static_cast<std::size_t>(it - symbols.begin());
    const std::size_t r = uniform_index(rng, symbols.size() - 1);
    return symbols[r >= self ? r + 1 : r];
  };
  for (int attempt = 0; attempt <= kMutationRetries; ++attempt) {
    mutant.symbols[pos] = draw_other(trace.symbols[pos]);
    if (!exclude.count(mutant.symbols)) return mutant;
  }
  for (std::size_t step = 0; step < len; ++step) {
    const std::size_t at = (pos + step) % len;
    mutant.symbols = trace.symbols;
    for (const auto& s : symbols) {
      if (s == trace.symbols[at]) continue;
      mutant.symbols[at] = s;
      if (!exclude.count(mutant.symbols)) return mutant;
    }
  }
  throw CannotAvoidPositives();
}

// Produces the model evaluated on a fold from its training traces.
using ModelBuilder = std::function<StateMachine(std::span<const Trace>)>;

/// k-fold cross-validation. Traces are shuffled by seed and dealt into k folds
/// whose sizes differ by at most one. Each held-out trace is a positive, and
/// one mutant of it that avoids every training trace is a negative.
/// Balanced accuracy is the mean of the averaged recall and specificity.
inline EvalMetrics evaluate(std::span<const Trace> traces, const ModelBuilder& build, std::size_t k,
                            std::uint64_t rng_seed) {
  if (k < 2) throw TooFewTraces("k-fold evaluation needs k >= 2");
  if (traces.size() < k)
    throw TooFewTraces("need at least " + std::to_string(k) + " traces, got " + std::to_string(traces.size()));
  const std::vector<Symbol> alphabet = alphabet_of(traces);

  std::vector<std::size_t> order(traces.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(rng_seed);
  shuffle_in_place(order, rng);

  EvalMetrics sum;
  for (std::size_t fold = 0; fold < k; ++fold) {
    std::vector<Trace> train;
    std::vector<Trace> test;
    for (std::size_t i = 0; i < order.size(); ++i) (i % k == fold ? test : train).push_back(traces[order[i]]);
    const StateMachine model = build(train);
    TraceSet train_set;
    for (const auto& t : train) train_set.insert(t.symbols);

    std::size_t accepted = 0;
    std::size_t rejected = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (accepts(model, test[i])) ++accepted;
      const Trace negative = mutate_trace(test[i], alphabet, mix_seed(rng_seed, fold * 1'000'003 + i), train_set);
      if (!accepts(model, negative)) ++rejected;
    }
    sum.avg_nodes += static_cast<double>(model.state_count());
    sum.avg_edges += static_cast<double>(model.transition_count());
    sum.recall += static_cast<double>(accepted) / static_cast<double>(test.size());
    sum.specificity += static_cast<double>(rejected) / static_cast<double>(test.size());
  }
  const double n = static_cast<double>(k);
  EvalMetrics m{sum.avg_nodes / n, sum.avg_edges / n, sum.recall / n, sum.specificity / n, 0.0};
  m.balanced_accuracy = (m.recall + m.specificity) / 2.0;
  return m;
}

inline EvalMetrics evaluate(std::span<const Trace> traces, const LearnerConfig& cfg, std::size_t k,
                            std::uint64_t rng_seed) {
  validate(cfg);
  return evaluate(traces, [cfg](std::span<const Trace> train) { return learn(train, cfg); }, k, rng_seed);
}

// Plain-text table, columns exactly as the EvalMetrics fields.
inline std::string metrics_table(const std::vector<EvalMetrics>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "avg_nodes" << std::setw(12) << "avg_edges" << std::setw(10) << "recall"
     << std::setw(13) << "specificity" << "balanced_accuracy\n";
  os << std::fixed;
  for (const auto& r : rows) {
    os << std::setprecision(1) << std::setw(12) << r.avg_nodes << std::setw(12) << r.avg_edges
       << std::setprecision(3) << std::setw(10) << r.recall << std::setw(13) << r.specificity
       << r.balanced_accuracy << "\n";
  }
  return os.str();
}

inline nlohmann::ordered_json metrics_json(const EvalMetrics& m) {
  nlohmann::ordered_json j;
  j["avg_nodes"] = m.avg_nodes;
  j["avg_edges"] = m.avg_edges;
  j["recall"] = m.recall;
  j["specificity"] = m.specificity;
  j["balanced_accuracy"] = m.balanced_accuracy;
  return j;
}

}  // namespace archconf
