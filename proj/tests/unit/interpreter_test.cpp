#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "archconf/interpreter.hpp"
#include "support/generators.hpp"

namespace archconf {
namespace {

std::set<std::string> ids(const std::vector<Interpretation>& list) {
  std::set<std::string> out;
  for (const auto& i : list) out.insert(i.cause_id);
  return out;
}

TEST(Interpretations, DynamicCoversRequiredCauses) {
  const auto dyn = ids(interpretations_for(NcKind::Dynamic));
  for (const char* id : {"dyn-misconfiguration", "dyn-dead-code", "dyn-not-exercised", "dyn-drift-residue"})
    EXPECT_TRUE(dyn.count(id)) << id;
}

TEST(Interpretations, StaticCoversRequiredCauses) {
  const auto sta = ids(interpretations_for(NcKind::Static));
  for (const char* id : {"sta-infrastructure", "sta-analysis-blind-spot", "sta-open-endpoint"})
    EXPECT_TRUE(sta.count(id)) << id;
}

TEST(Interpretations, NonEmptyDisjointAndStable) {
  const auto s = interpretations_for(NcKind::Static);
  const auto d = interpretations_for(NcKind::Dynamic);
  ASSERT_FALSE(s.empty());
  ASSERT_FALSE(d.empty());
  for (const auto& id : ids(s)) EXPECT_FALSE(ids(d).count(id));
  EXPECT_EQ(interpretations_for(NcKind::Static), s);
  EXPECT_EQ(d.front().cause_id, "dyn-misconfiguration");
}

TEST(Catalog, BundledTextMatchesResourceFile) {
  std::ifstream in(ARCHCONF_CATALOG_FILE, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), std::string(kBundledCatalog));
}

TEST(Catalog, ParseErrors) {
  EXPECT_THROW(parse_catalog("a | static | t | b\n"), MalformedLine);
  EXPECT_THROW(parse_catalog("a | static | t |  | s\n"), MalformedLine);
  EXPECT_THROW(parse_catalog("a | sideways | t | b | s\n"), MalformedLine);
  try {
    parse_catalog("# c\na | static | t | b | s\n\na | dynamic | t | b | s\n");
    FAIL();
  } catch (const MalformedLine& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  const auto ok = parse_catalog("x | dynamic | Title | Body text | Ref 2020\n");
  ASSERT_EQ(ok.size(), 1u);
  EXPECT_EQ(ok[0].kind, NcKind::Dynamic);
  EXPECT_EQ(ok[0].interpretation, (Interpretation{"x", "Title", "Body text", "Ref 2020"}));
}

// 0 -> 1 -> 2 -> 3 -> 4 -> 5 where only 3 -> 4 is a call from a to b.
StateMachine chain() {
  StateMachine sm;
  sm.add_transition(0, "u→g:GET /", 1, 9);
  sm.add_transition(1, "g→a:GET /a", 2, 8);
  sm.add_transition(2, "a→c:GET /c", 3, 7);
  sm.add_transition(3, "a→b:GET /b", 4, 6);
  sm.add_transition(4, "b→d:GET /d", 5, 5);
  return sm;
}

std::multiset<std::pair<Symbol, std::uint64_t>> labels(const StateMachine& sm) {
  std::multiset<std::pair<Symbol, std::uint64_t>> out;
  for (const auto& [key, t] : sm.transitions) out.emplace(key.second, t.frequency);
  return out;
}

// Oracle: involved transitions plus transitions sharing a state with them,
// computed on the original numbering.
std::multiset<std::pair<Symbol, std::uint64_t>> closure_oracle(const StateMachine& sm, const std::string& a,
                                                               const std::string& b) {
  std::set<StateId> states;
  for (const auto& [key, t] : sm.transitions) {
    auto p = parse_symbol(key.second);
    if (p->src == a && p->dst == b) states.insert({key.first, t.target});
  }
  std::multiset<std::pair<Symbol, std::uint64_t>> out;
  for (const auto& [key, t] : sm.transitions)
    if (states.count(key.first) || states.count(t.target)) out.emplace(key.second, t.frequency);
  return out;
}

TEST(Submachine, ChainKeepsOneHopOfContext) {
  const StateMachine sub = unexpected_behavior_submachine(chain(), "a", "b");
  EXPECT_EQ(labels(sub), closure_oracle(chain(), "a", "b"));
  EXPECT_EQ(sub.state_count(), 4u);
  ASSERT_NE(sub.find(sub.initial, "a→b:GET /b"), nullptr);
  EXPECT_EQ(sub.find(sub.initial, "a→b:GET /b")->frequency, 6u);
}

TEST(Submachine, NoInvolvedTransitions) {
  EXPECT_THROW(unexpected_behavior_submachine(chain(), "b", "a"), NoInvolvedTransitions);
}

TEST(Submachine, AllTransitionsInvolved) {
  StateMachine sm;
  sm.add_transition(0, "a→b:GET /1", 1, 2);
  sm.add_transition(1, "a→b:GET /2", 2, 2);
  sm.add_transition(2, "a→b:GET /3", 0, 1);
  EXPECT_EQ(unexpected_behavior_submachine(sm, "a", "b"), canonicalize(sm));
}

TEST(Submachine, RandomMachinesMatchClosureOracle) {
  Rng rng(31);
  const auto alphabet = testing::symbol_alphabet(8);
  for (int i = 0; i < 200; ++i) {
    const StateMachine sm = testing::random_machine(rng, 2 + uniform_index(rng, 8), alphabet);
    const auto p = parse_symbol(alphabet[uniform_index(rng, alphabet.size())]);
    if (!has_transition_matching(sm, between(p->src, p->dst))) {
      EXPECT_THROW(unexpected_behavior_submachine(sm, p->src, p->dst), NoInvolvedTransitions);
      continue;
    }
    const StateMachine sub = unexpected_behavior_submachine(sm, p->src, p->dst);
    const auto got = labels(sub);
    EXPECT_EQ(got, closure_oracle(sm, p->src, p->dst));
    const auto all = labels(sm);
    for (const auto& l : got) EXPECT_TRUE(all.count(l));
  }
}

TEST(FrequentCalls, TopN) {
  StateMachine sm;
  sm.add_transition(0, "a→b:GET /x", 1, 5);
  sm.add_transition(1, "a→b:POST /y", 0, 2);
  const auto top = most_frequent_calls(sm, "a", "b", 1);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0], (CallSummary{"a", "b", "GET", "/x", 5}));
  EXPECT_EQ(most_frequent_calls(sm, "a", "b").size(), 2u);
}

TEST(FrequentCalls, NoCalls) { EXPECT_TRUE(most_frequent_calls(chain(), "b", "a").empty()); }

TEST(FrequentCalls, GroupsSameCall) {
  StateMachine sm;
  sm.add_transition(0, "a→b:GET /x/{}", 1, 3);
  sm.add_transition(1, "a→b:GET /x/{}", 2, 4);
  const auto calls = most_frequent_calls(sm, "a", "b");
  ASSERT_EQ(calls.size(), 1u);
  EXPECT_EQ(calls[0].count, 7u);
}

TEST(FrequentCalls, CountsBoundedByTotal) {
  Rng rng(32);
  const auto alphabet = testing::symbol_alphabet(12);
  for (int i = 0; i < 100; ++i) {
    const StateMachine sm = testing::random_machine(rng, 2 + uniform_index(rng, 6), alphabet);
    const std::string a = "s" + std::to_string(uniform_index(rng, 4));
    const std::string b = "s" + std::to_string(4 + uniform_index(rng, 4));
    std::uint64_t total = 0;
    for (const auto& [key, t] : sm.transitions) {
      auto p = parse_symbol(key.second);
      if (p->src == a && p->dst == b) total += t.frequency;
    }
    auto sum = [](const std::vector<CallSummary>& calls) {
      std::uint64_t s = 0;
      for (const auto& c : calls) s += c.count;
      return s;
    };
    EXPECT_LE(sum(most_frequent_calls(sm, a, b, 1)), total);
    const auto all = most_frequent_calls(sm, a, b, 1000);
    EXPECT_EQ(sum(all), total);
    EXPECT_TRUE(std::is_sorted(all.begin(), all.end(),
                               [](const CallSummary& x, const CallSummary& y) { return x.count > y.count; }));
  }
}

StaticModel dfd(std::initializer_list<std::pair<const char*, const char*>> flows, std::vector<std::string> externals) {
  StaticModel m;
  std::set<std::string> names;
  for (const auto& [s, r] : flows) {
    names.insert(s);
    names.insert(r);
    m.flows.push_back({s, r, {"restful_http", "GET /" + std::string(r)}, Traceability{std::string(s) + ".py", 7, {}}});
  }
  for (const auto& n : names) {
    const bool ext = std::find(externals.begin(), externals.end(), n) != externals.end();
    (ext ? m.external_entities : m.services).push_back({n, {}, ext, std::nullopt});
  }
  return m;
}

std::vector<std::string> flow_names(const std::vector<Flow>& flows) {
  std::vector<std::string> out;
  for (const auto& f : flows) out.push_back(f.sender + ">" + f.receiver);
  return out;
}

TEST(DynamicDetails, UniquePathFromUser) {
  const StaticModel m = dfd({{"user", "gateway"}, {"gateway", "order"}, {"order", "payment"}}, {"user"});
  const auto d = dynamic_nc_details(m, make_nc(NcKind::Dynamic, SubjectType::Edge, {"order", "payment"}));
  EXPECT_EQ(flow_names(d.trigger_sequence),
            (std::vector<std::string>{"user>gateway", "gateway>order", "order>payment"}));
  ASSERT_TRUE(d.code_pointer);
  EXPECT_EQ(d.code_pointer->file, "order.py");
  ASSERT_EQ(d.call_details.size(), 3u);
  EXPECT_EQ(d.call_details[2], (CallSummary{"order", "payment", "GET", "/payment", 1}));
}

TEST(DynamicDetails, EntrySenderHasNoPrefix) {
  const StaticModel m = dfd({{"user", "gateway"}, {"gateway", "order"}}, {"user"});
  const auto d = dynamic_nc_details(m, make_nc(NcKind::Dynamic, SubjectType::Edge, {"user", "gateway"}));
  EXPECT_EQ(flow_names(d.trigger_sequence), (std::vector<std::string>{"user>gateway"}));
}

TEST(DynamicDetails, NodeWithoutTraceability) {
  const StaticModel m = dfd({{"user", "gateway"}, {"gateway", "order"}}, {"user"});
  const auto d = dynamic_nc_details(m, make_nc(NcKind::Dynamic, SubjectType::Node, {"order"}));
  EXPECT_FALSE(d.code_pointer);
  EXPECT_EQ(flow_names(d.trigger_sequence), (std::vector<std::string>{"user>gateway", "gateway>order"}));
}

// Oracle: all shortest entry paths by exhaustive enumeration, smallest node
// sequence wins.
std::optional<std::vector<std::string>> shortest_path_oracle(const StaticModel& m, const std::string& target) {
  std::set<std::string> entries;
  for (const auto& e : m.external_entities) entries.insert(e.name);
  for (const auto* group : {&m.services, &m.external_entities})
    for (const auto& n : *group) {
      bool has_in = false;
      for (const auto& f : m.flows) has_in |= f.receiver == n.name && f.sender != n.name;
      if (!has_in) entries.insert(n.name);
    }
  if (entries.count(target)) return std::vector<std::string>{target};
  std::vector<std::vector<std::string>> found;
  std::vector<std::vector<std::string>> frontier;
  for (const auto& e : entries) frontier.push_back({e});
  const std::size_t limit = m.services.size() + m.external_entities.size();
  for (std::size_t len = 1; len <= limit && found.empty(); ++len) {
    std::vector<std::vector<std::string>> next;
    for (const auto& p : frontier)
      for (const auto& f : m.flows) {
        if (f.sender != p.back() || f.sender == f.receiver) continue;
        if (std::find(p.begin(), p.end(), f.receiver) != p.end()) continue;
        auto q = p;
        q.push_back(f.receiver);
        (f.receiver == target ? found : next).push_back(q);
      }
    frontier = std::move(next);
  }
  if (found.empty()) return std::nullopt;
  return *std::min_element(found.begin(), found.end());
}

TEST(DynamicDetails, DiamondPicksSmallerPath) {
  const StaticModel m =
      dfd({{"user", "gw"}, {"gw", "zeta"}, {"gw", "alpha"}, {"zeta", "sink"}, {"alpha", "sink"}, {"sink", "db"}},
          {"user"});
  const auto d = dynamic_nc_details(m, make_nc(NcKind::Dynamic, SubjectType::Edge, {"sink", "db"}));
  EXPECT_EQ(flow_names(d.trigger_sequence),
            (std::vector<std::string>{"user>gw", "gw>alpha", "alpha>sink", "sink>db"}));
  EXPECT_EQ(shortest_path_oracle(m, "sink"), (std::vector<std::string>{"user", "gw", "alpha", "sink"}));
}

TEST(DynamicDetails, RandomModelsMatchPathOracle) {
  Rng rng(33);
  for (int i = 0; i < 300; ++i) {
    const StaticModel m = testing::random_static_model(rng);
    for (const auto& f : m.flows) {
      const auto d = dynamic_nc_details(m, make_nc(NcKind::Dynamic, SubjectType::Edge, {f.sender, f.receiver}));
      const auto expected = f.sender == f.receiver ? std::optional<std::vector<std::string>>{{f.sender}}
                                                   : shortest_path_oracle(m, f.sender);
      if (!expected) {
        EXPECT_TRUE(d.trigger_sequence.empty());
        continue;
      }
      ASSERT_FALSE(d.trigger_sequence.empty());
      EXPECT_EQ(d.trigger_sequence.back().sender, f.sender);
      EXPECT_EQ(d.trigger_sequence.back().receiver, f.receiver);
      std::vector<std::string> nodes{d.trigger_sequence.front().sender};
      for (std::size_t k = 1; k < d.trigger_sequence.size(); ++k) {
        EXPECT_EQ(d.trigger_sequence[k - 1].receiver, d.trigger_sequence[k].sender);
        nodes.push_back(d.trigger_sequence[k].sender);
      }
      EXPECT_EQ(nodes, *expected);
    }
  }
}

}  // namespace
}  // namespace archconf
