#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "causal_boot/errors.hpp"
#include "causal_boot/identify.hpp"
#include "oracles.hpp"

using namespace causal_boot;

namespace {

Estimand identified(const CausalGraph& g, const NodeSet& outcome, const NodeSet& intervention) {
  const auto r = identify(g, outcome, intervention);
  REQUIRE(std::holds_alternative<Identified>(r));
  return std::get<Identified>(r).estimand;
}

JointTable joint_of(const oracle::BinaryScm& scm) {
  const auto names = scm.observed_names();
  return JointTable(names, std::vector<int>(names.size(), 2), scm.distribution(names));
}

}  // namespace

TEST_CASE("scenario estimands render canonically") {
  CHECK(estimand_to_text(identified(scenario_graph(ScenarioId::ObservedConf), {"X"}, {"Y"})) ==
        "Σ_{u} P(x|y,u) P(u)");
  CHECK(estimand_to_text(identified(scenario_graph(ScenarioId::ObservedConfMediator), {"X"}, {"Y"})) ==
        "Σ_{u,z} P(x|u,z) P(z|y) P(u)");
  CHECK(estimand_to_text(identified(scenario_graph(ScenarioId::PartialConfMediator), {"X"}, {"Y"})) ==
        "Σ_{u,z} (Σ_{y'} P(x|u,y',z) P(y'|u)) P(z|y) P(u)");
}

TEST_CASE("scenario estimands match the golden file") {
  std::ifstream in(std::string(CAUSAL_BOOT_TEST_DATA) + "/golden/scenario_estimands.txt");
  REQUIRE(in);
  std::map<char, std::string> golden;
  std::string line;
  while (std::getline(in, line))
    if (line.size() > 2) golden[line[0]] = line.substr(2);
  for (ScenarioId s : kAllScenarios) {
    INFO(scenario_letter(s));
    CHECK(estimand_to_text(identified(scenario_graph(s), {"X"}, {"Y"})) == golden.at(scenario_letter(s)));
  }
}

TEST_CASE("bow graph is unidentifiable") {
  const auto r = identify(parse_graph("Y->X; Y<->X"), {"X"}, {"Y"});
  REQUIRE(std::holds_alternative<Unidentifiable>(r));
  CHECK(std::get<Unidentifiable>(r).witness.find("hedge") != std::string::npos);
}

TEST_CASE("identify preconditions") {
  const auto g = scenario_graph(ScenarioId::ObservedConf);
  CHECK_THROWS_AS(identify(g, {"X"}, {"X"}), SetOverlapError);
  CHECK_THROWS_AS(identify(g, {"Q"}, {"Y"}), UnknownNodeError);
  CHECK_THROWS(identify(parse_graph("latent H; H->X; Y->X"), {"X"}, {"H"}));
}

TEST_CASE("identify is deterministic") {
  for (ScenarioId s : kAllScenarios) {
    const auto g = scenario_graph(s);
    CHECK(identified(g, {"X"}, {"Y"}) == identified(g, {"X"}, {"Y"}));
  }
}

TEST_CASE("do-calculus rule conditions") {
  CHECK(rule_applicable(scenario_graph(ScenarioId::ObservedConfMediator), DoRule::ActionObservation, {"Z"}, {}, {"Y"},
                        {}));
  CHECK(rule_applicable(scenario_graph(ScenarioId::ObservedConf), DoRule::Action, {"U"}, {}, {"Y"}, {}));
  CHECK(rule_applicable(parse_graph("A->B->C"), DoRule::Observation, {"C"}, {}, {"A"}, {"B"}));
  CHECK_FALSE(rule_applicable(parse_graph("A->B->C"), DoRule::Observation, {"C"}, {}, {"A"}, {}));
  // X <- Y is confounded in the bow graph, so do(y) cannot become observing y.
  CHECK_FALSE(rule_applicable(parse_graph("Y->X; Y<->X"), DoRule::ActionObservation, {"X"}, {}, {"Y"}, {}));
  CHECK_THROWS_AS(rule_applicable(parse_graph("A->B"), DoRule::Observation, {"A"}, {}, {"A"}, {}), SetOverlapError);
}

TEST_CASE("estimand text details") {
  CHECK(estimand_to_text(Estimand::marginal({"U"})) == "P(u)");
  CHECK(estimand_to_text(Estimand::cond({"X"}, {})) == "P(x)");
  CHECK(estimand_to_text(Estimand::indicator("Y", 1)) == "I[y=1]");
  const auto e = Estimand::sum({"U"}, Estimand::product({Estimand::cond({"X"}, {"Y", "U"}), Estimand::marginal({"U"})}));
  CHECK(e.free_variables() == NodeSet{"X", "Y"});
}

TEST_CASE("evaluate: marginal over a single variable") {
  const JointTable joint({"X"}, {3}, {0.2, 0.5, 0.3});
  const auto p = evaluate_estimand(Estimand::marginal({"X"}), joint, {"X"}, {});
  CHECK(p == std::vector<double>{0.2, 0.5, 0.3});
}

TEST_CASE("evaluate: backdoor formula on a 2x2x2 joint") {
  CounterRng rng(5);
  const oracle::BinaryScm scm(scenario_graph(ScenarioId::ObservedConf), rng);
  const auto names = scm.observed_names();
  const oracle::Joint hand(names, scm.distribution(names));
  const auto e = identified(scenario_graph(ScenarioId::ObservedConf), {"X"}, {"Y"});
  for (int y = 0; y <= 1; ++y) {
    const auto got = evaluate_estimand(e, joint_of(scm), {"X"}, {{"Y", y}});
    for (int x = 0; x <= 1; ++x) {
      double expect = 0.0;
      for (int u = 0; u <= 1; ++u) expect += hand.cond({{"X", x}}, {{"Y", y}, {"U", u}}) * hand.prob({{"U", u}});
      CHECK(got[x] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("evaluate: front-door estimand recovers the structural intervention") {
  // Hidden H confounds Y and X; Y reaches X only through Z.
  const oracle::BinaryScm scm({{"H", false, {}, {0.3}},
                               {"Y", true, {"H"}, {0.2, 0.85}},
                               {"Z", true, {"Y"}, {0.1, 0.7}},
                               {"X", true, {"Z", "H"}, {0.15, 0.6, 0.5, 0.9}}});
  const auto e = identified(scenario_graph(ScenarioId::UnobservedConfMediator), {"X"}, {"Y"});
  const JointTable joint({"Y", "Z", "X"}, {2, 2, 2}, scm.distribution({"Y", "Z", "X"}));
  for (int y = 0; y <= 1; ++y) {
    const auto truth = scm.distribution({"X"}, {{"Y", y}});
    const auto got = evaluate_estimand(e, joint, {"X"}, {{"Y", y}});
    CHECK(got[0] == doctest::Approx(truth[0]).epsilon(1e-12));
    CHECK(got[1] == doctest::Approx(truth[1]).epsilon(1e-12));
  }
}

TEST_CASE("evaluate: zero-mass conditioning is an error") {
  // P(y=1) = 0, so P(x | y=1, u) is 0/0.
  const JointTable joint({"U", "Y", "X"}, {2, 2, 2}, {0.25, 0.25, 0, 0, 0.25, 0.25, 0, 0});
  const auto e = identified(scenario_graph(ScenarioId::ObservedConf), {"X"}, {"Y"});
  CHECK_NOTHROW(evaluate_estimand(e, joint, {"X"}, {{"Y", 0}}));
  CHECK_THROWS_AS(evaluate_estimand(e, joint, {"X"}, {{"Y", 1}}), ZeroSupportError);
}

TEST_CASE("joint table validation") {
  CHECK_THROWS_AS(JointTable({"A"}, {2}, {0.5, 0.6}), InvalidArgument);
  CHECK_THROWS_AS(JointTable({"A"}, {2}, {1.5, -0.5}), InvalidArgument);
  CHECK_THROWS_AS(JointTable({"A"}, {2}, {1.0}), InvalidArgument);
  const JointTable t({"A", "B"}, {2, 3}, {0.1, 0.1, 0.1, 0.2, 0.2, 0.3});
  CHECK(t.mass({{"A", 1}}) == doctest::Approx(0.7));
  CHECK(t.mass({{"B", 2}}) == doctest::Approx(0.4));
  CHECK(t.marginalize({"B"}).probabilities()[1] == doctest::Approx(0.3));
}

TEST_CASE("identify is sound on random graphs") {
  CounterRng rng(99);
  int identified_count = 0, unidentifiable_count = 0;
  std::map<std::string, Estimand> by_text;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + rng.below(4);
    const auto g = oracle::random_graph(rng, n, 0.5, 0.25);
    const auto names = g.topological_order();
    NodeSet outcome, intervention;
    for (const auto& v : names) {
      const auto r = rng.below(3);
      if (r == 0) outcome.insert(v);
      else if (r == 1) intervention.insert(v);
    }
    if (outcome.empty()) outcome.insert(names.back());
    for (const auto& v : outcome) intervention.erase(v);
    const auto result = identify(g, outcome, intervention);
    if (std::holds_alternative<Unidentifiable>(result)) {
      ++unidentifiable_count;
      continue;
    }
    ++identified_count;
    const auto& e = std::get<Identified>(result).estimand;
    const auto text = estimand_to_text(e);
    if (auto it = by_text.find(text); it != by_text.end()) {
      CHECK(it->second == e);
    } else {
      by_text.emplace(text, e);
    }

    const oracle::BinaryScm scm(g, rng);
    const std::vector<std::string> out_order(outcome.begin(), outcome.end());
    const std::vector<std::string> do_order(intervention.begin(), intervention.end());
    const auto joint = joint_of(scm);
    for (std::size_t bits = 0; bits < (std::size_t{1} << do_order.size()); ++bits) {
      Assignment forced;
      for (std::size_t i = 0; i < do_order.size(); ++i) forced[do_order[i]] = static_cast<int>((bits >> i) & 1U);
      const auto truth = scm.distribution(out_order, forced);
      const auto got = evaluate_estimand(e, joint, out_order, forced);
      INFO(to_dsl(g), " | ", text);
      REQUIRE(got.size() == truth.size());
      for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(truth[k]).epsilon(1e-9));
    }
  }
  CHECK(identified_count > 60);
  CHECK(unidentifiable_count > 5);
}
