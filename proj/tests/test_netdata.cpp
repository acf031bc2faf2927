#include <gtest/gtest.h>

#include "drdmf/netdata/ieee37.hpp"
#include "drdmf/netdata/io.hpp"
#include "drdmf/netdata/validate.hpp"
#include "fixtures.hpp"

using namespace drdmf;

namespace {

bool has_issue(const ValidationReport& r, const std::string& needle) {
  for (const auto& i : r.issues)
    if (i.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(CaseIo, RoundTripIsExact) {
  const auto c = fixture::four_node_fixture();
  const auto text = serialize_case(c);
  const auto back = parse_case(text);
  EXPECT_EQ(back, c);
  EXPECT_EQ(case_fingerprint(back), case_fingerprint(c));
  EXPECT_EQ(serialize_case(back), text);
}

TEST(CaseIo, Ieee37RoundTrip) {
  const auto c = build_ieee37_case();
  EXPECT_EQ(parse_case(serialize_case(c)), c);
}

TEST(CaseIo, FingerprintSeesSmallChanges) {
  auto c = fixture::four_node_fixture();
  const auto fp = case_fingerprint(c);
  c.edges[2].mu_max[1] += 1e-9;
  EXPECT_NE(case_fingerprint(c), fp);
}

TEST(CaseIo, WrongArityNamesTheNode) {
  auto j = case_to_json(fixture::four_node_fixture());
  j["nodes"][2]["demand_p"] = json::array({1.0, 2.0, 3.0});
  try {
    case_from_json(j);
    FAIL() << "expected CaseError";
  } catch (const CaseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("(3)"), std::string::npos) << msg;
    EXPECT_NE(msg.find("demand_p"), std::string::npos) << msg;
    EXPECT_NE(msg.find("length 3"), std::string::npos) << msg;
  }
}

TEST(CaseIo, ScalarBroadcastsOverHorizon) {
  auto j = case_to_json(fixture::four_node_fixture());
  j["edges"][0]["mu_max"] = 0.25;
  const auto c = case_from_json(j);
  EXPECT_EQ(c.edges[0].mu_max, (std::vector<double>{0.25, 0.25}));
}

TEST(CaseIo, MissingKeyAndMalformedText) {
  auto j = case_to_json(fixture::four_node_fixture());
  j["params"].erase("k");
  EXPECT_THROW(case_from_json(j), CaseError);
  EXPECT_THROW(parse_case("{ not json"), CaseError);
  EXPECT_THROW(load_case("/nonexistent/case.json"), CaseError);
}

TEST(Validate, FixtureIsValid) {
  const auto r = validate_case(fixture::four_node_fixture());
  EXPECT_TRUE(r.ok()) << (r.issues.empty() ? "" : r.issues.front());
}

TEST(Validate, ReportsEveryProblem) {
  auto c = fixture::four_node_fixture();
  c.edges[0].mu_max[1] = 1.5;
  c.edges.push_back(c.edges[1]);
  c.dgs.clear();
  c.v_min = 1.01;
  c.nodes[1].weight = 50.0;  // above the critical ones
  const auto r = validate_case(c);
  EXPECT_TRUE(has_issue(r, "mu_max out of [0,1]"));
  EXPECT_TRUE(has_issue(r, "duplicate line"));
  EXPECT_TRUE(has_issue(r, "grid-forming"));
  EXPECT_TRUE(has_issue(r, "v_min < 1 < v_max"));
  EXPECT_TRUE(has_issue(r, "critical weight"));
}

TEST(Validate, DisconnectedNetwork) {
  auto c = fixture::four_node_fixture();
  c.nodes.push_back({"island", {1, 1}, {0, 0}, 1.0, false});
  EXPECT_TRUE(has_issue(validate_case(c), "not connected"));
}

TEST(Ieee37, DefaultShape) {
  const auto c = build_ieee37_case();
  EXPECT_EQ(c.nodes.size(), 36u);
  EXPECT_EQ(c.edges.size(), 39u);
  EXPECT_EQ(c.horizon_steps, 4);
  EXPECT_EQ(c.dgs.size(), 3u);
  EXPECT_TRUE(validate_case(c).ok());
  int ties = 0, closed = 0;
  for (const auto& e : c.edges) {
    ties += e.is_tie;
    closed += e.initially_closed;
    for (std::size_t t = 1; t < e.mu_max.size(); ++t) EXPECT_GE(e.mu_max[t], e.mu_max[t - 1]);
  }
  EXPECT_EQ(ties, 4);
  EXPECT_EQ(closed, 35);  // a spanning tree of 36 buses
  double load = 0.0;
  for (const auto& n : c.nodes) load += n.demand_p[0];
  EXPECT_NEAR(load, 2457.0, 1e-9);
  double cap = 0.0;
  for (const auto& d : c.dgs) cap += d.p_max[0];
  EXPECT_NEAR(cap / load, 0.8, 0.01);
}

TEST(Ieee37, OptionsAreChecked) {
  Ieee37Options o;
  o.dg_nodes = {"999"};
  EXPECT_THROW(build_ieee37_case(o), std::invalid_argument);
  o = {};
  o.typhoon_path = {{"701-799"}};
  EXPECT_THROW(build_ieee37_case(o), std::invalid_argument);
  o = {};
  o.horizon_steps = 6;
  EXPECT_EQ(build_ieee37_case(o).horizon_steps, 6);
}
