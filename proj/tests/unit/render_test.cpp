#include <gtest/gtest.h>

#include <regex>

#include "archconf/render.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

namespace archconf {
namespace {

std::size_t occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + needle.size())) ++n;
  return n;
}

TaggedView tagged(std::initializer_list<std::pair<Edge, PresenceTag>> edges) {
  TaggedView tv;
  for (const auto& [e, t] : edges) {
    tv.edges.emplace(e, t);
    tv.nodes.try_emplace(e.first, PresenceTag::Both);
    tv.nodes.try_emplace(e.second, PresenceTag::Both);
  }
  return tv;
}

TEST(ArchitecturePuml, DynamicOnlyEdgeIsOrangeDashed) {
  const std::string puml = render_architecture_puml(tagged({{{"a", "b"}, PresenceTag::DynamicOnly}}));
  EXPECT_NE(puml.find("c0 -[#orange,dashed]-> c1\n"), std::string::npos);
  EXPECT_TRUE(check_puml(puml).empty());
}

TEST(ArchitecturePuml, StaticOnlyEdgeIsBlueDotted) {
  const std::string puml = render_architecture_puml(tagged({{{"a", "b"}, PresenceTag::StaticOnly}}));
  EXPECT_NE(puml.find("c0 -[#blue,dotted]-> c1\n"), std::string::npos);
}

TEST(ArchitecturePuml, NodeStyles) {
  TaggedView tv;
  tv.nodes = {{"x", PresenceTag::StaticOnly}, {"y", PresenceTag::DynamicOnly}, {"z", PresenceTag::Both}};
  const std::string puml = render_architecture_puml(tv);
  EXPECT_NE(puml.find("component \"x\" as c0 #line:blue;line.dotted;text:blue\n"), std::string::npos);
  EXPECT_NE(puml.find("component \"y\" as c1 #line:orange;line.dashed;text:orange\n"), std::string::npos);
  EXPECT_NE(puml.find("component \"z\" as c2 #line:black;text:black\n"), std::string::npos);
}

TEST(ArchitecturePuml, AllBothHasNoHighlightColors) {
  const std::string puml =
      render_architecture_puml(tagged({{{"a", "b"}, PresenceTag::Both}, {{"b", "a"}, PresenceTag::Both}}));
  EXPECT_EQ(puml.find("blue"), std::string::npos);
  EXPECT_EQ(puml.find("orange"), std::string::npos);
}

TEST(ArchitecturePuml, RandomViewsAreValidAndSorted) {
  Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    const Detection d = detect(testing::random_view(rng, 6), testing::random_view(rng, 6));
    const std::string puml = render_architecture_puml(d.tagged);
    EXPECT_TRUE(check_puml(puml).empty()) << puml;
    std::vector<std::string> names;
    static const std::regex kName(R"re(component "([^"]+)")re");
    for (std::sregex_iterator it(puml.begin(), puml.end(), kName), end; it != end; ++it) names.push_back((*it)[1]);
    EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
    EXPECT_EQ(names.size(), d.tagged.nodes.size());
    EXPECT_EQ(render_architecture_puml(d.tagged), puml);
  }
}

TEST(ArchitecturePuml, FixtureGolden) {
  const std::string puml = render_architecture_puml(testing::fixture_tagged_view());
  EXPECT_TRUE(testing::matches_golden("architecture.puml", puml));
  EXPECT_TRUE(check_puml(puml).empty());
}

TEST(StateMachinePuml, ValidAndHighlighted) {
  const StateMachine sm = testing::fixture_machine();
  const std::string puml = render_state_machine_puml(sm, between("order", "catalog"));
  EXPECT_TRUE(check_puml(puml).empty()) << puml;
  EXPECT_EQ(occurrences(puml, "-[#orange]->"), 2u);
  EXPECT_NE(puml.find("[*] --> S0\n"), std::string::npos);
}

TEST(CheckPuml, RejectsBrokenText) {
  EXPECT_FALSE(check_puml("").empty());
  EXPECT_FALSE(check_puml("@startuml\nc0 -[#blue]-> c1\n@enduml\n").empty());
  EXPECT_FALSE(check_puml("@startuml\nthis is not plantuml\n@enduml\n").empty());
  EXPECT_FALSE(check_puml("@startuml\ncomponent \"a\" as c0 #line:black;text:black\n").empty());
}

TEST(NcPage, StaticContents) {
  const std::string page = testing::fixture_static_page();
  EXPECT_NE(page.find("static non-conformance"), std::string::npos);
  for (const auto& i : interpretations_for(NcKind::Static)) EXPECT_NE(page.find(detail::html_escape(i.title)), std::string::npos);
  EXPECT_EQ(occurrences(page, "<table>"), 1u);
  const auto s1 = page.find("1. Non-conformance");
  const auto s2 = page.find("2. Possible interpretations");
  const auto s3 = page.find("3. Additional details");
  EXPECT_LT(s1, s2);
  EXPECT_LT(s2, s3);
  EXPECT_NE(s3, std::string::npos);
  EXPECT_EQ(page.find("http://"), std::string::npos);
  EXPECT_EQ(page.find("https://"), std::string::npos);
  EXPECT_EQ(page.find("<script"), std::string::npos);
}

TEST(NcPage, StaticWithTwoInterpretations) {
  const NonConformance nc = make_nc(NcKind::Static, SubjectType::Edge, {"a", "b"});
  StateMachine sm;
  sm.add_transition(0, "a→b:GET /x", 1, 2);
  StaticNcDetails d;
  d.submachine = unexpected_behavior_submachine(sm, "a", "b");
  d.frequent_calls = most_frequent_calls(sm, "a", "b");
  NcDetails details{d, {}};
  const std::vector<Interpretation> two{{"one", "First cause", "b1", "s1"}, {"two", "Second cause", "b2", "s2"}};
  const std::string page = render_nc_page(nc, two, details);
  EXPECT_NE(page.find("static non-conformance"), std::string::npos);
  EXPECT_NE(page.find("First cause"), std::string::npos);
  EXPECT_NE(page.find("Second cause"), std::string::npos);
  EXPECT_EQ(occurrences(page, "<table>"), 1u);
}

TEST(NcPage, DynamicWithoutTraceability) {
  const NonConformance nc = make_nc(NcKind::Dynamic, SubjectType::Node, {"ghost"});
  NcDetails details{DynamicNcDetails{}, {}};
  const std::string page = render_nc_page(nc, interpretations_for(nc.kind), details);
  EXPECT_NE(page.find("No traceability information available."), std::string::npos);
  EXPECT_NE(page.find("dynamic non-conformance"), std::string::npos);
}

TEST(NcPage, DynamicContents) {
  const std::string page = testing::fixture_dynamic_page();
  EXPECT_NE(page.find("order/src/Checkout.java:88"), std::string::npos);
  EXPECT_NE(page.find("client.post(&quot;/charge&quot;, body);"), std::string::npos);
  EXPECT_NE(page.find("<ol>\n<li>user"), std::string::npos);
}

TEST(NcPage, GoldenFiles) {
  EXPECT_TRUE(testing::matches_golden("nc_static-edge-order--catalog.html", testing::fixture_static_page()));
  EXPECT_TRUE(testing::matches_golden("nc_dynamic-edge-order--payment.html", testing::fixture_dynamic_page()));
  EXPECT_EQ(testing::fixture_static_page(), testing::fixture_static_page());
}

TEST(Index, CountsAndLinks) {
  const std::vector<NonConformance> ncs{make_nc(NcKind::Static, SubjectType::Node, {"c"}),
                                        make_nc(NcKind::Static, SubjectType::Edge, {"b", "c"}),
                                        make_nc(NcKind::Dynamic, SubjectType::Edge, {"a", "d"})};
  const std::string html = render_index(TaggedView{}, ncs);
  EXPECT_NE(html.find("2 static"), std::string::npos);
  EXPECT_NE(html.find("1 dynamic"), std::string::npos);
  EXPECT_EQ(occurrences(html, "<a href="), 3u);
  for (const auto& nc : ncs) {
    EXPECT_EQ(occurrences(html, "href=\"" + nc_page_filename(nc.id) + "\""), 1u);
    EXPECT_EQ(occurrences(html, ">" + nc.id + "<"), 1u);
  }
  EXPECT_NE(html.find("Detected 2 static non-conformances and 1 dynamic non-conformance between"), std::string::npos);
}

TEST(Index, FullyConformant) {
  const std::string html = render_index(tagged({{{"a", "b"}, PresenceTag::Both}}), {});
  EXPECT_NE(html.find("fully conformant"), std::string::npos);
  EXPECT_EQ(occurrences(html, "<a href="), 0u);
}

TEST(SummaryLine, Pluralization) {
  EXPECT_EQ(summary_line(2, 1),
            "Detected 2 static non-conformances and 1 dynamic non-conformance between implementation and deployment "
            "of the system!");
  EXPECT_EQ(summary_line(1, 0),
            "Detected 1 static non-conformance and 0 dynamic non-conformances between implementation and deployment "
            "of the system!");
}

TEST(PageFilename, FromId) { EXPECT_EQ(nc_page_filename("static-node-c"), "nc_static-node-c.html"); }

}  // namespace
}  // namespace archconf
