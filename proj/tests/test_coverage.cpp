#include <random>

#include "doctest.h"

#include "gsnassure/guardrails.hpp"
#include "support/builders.hpp"
#include "support/random_graph.hpp"

using namespace gsn;
using namespace gsn::test;

namespace {

GuardrailRecord guardrail(std::string id, Layer layer, std::set<AttackClass> coverage,
                          bool active = true) {
  GuardrailRecord r;
  r.id = std::move(id);
  r.name = r.id;
  r.layer = layer;
  r.coverage = std::move(coverage);
  r.active = active;
  return r;
}

// goal G1 (scoped) <- S1 <- goal G2 <- solutions Sn1, Sn2
ArgumentGraph scoped_case(std::set<AttackClass> scope) {
  ArgumentGraph g("case1");
  g.add_node(goal("G1", "claim", std::move(scope)));
  g.add_node(strategy("S1"));
  g.add_node(goal("G2", "subclaim"));
  g.add_node(solution("Sn1"));
  g.add_node(solution("Sn2"));
  g.add_edge(supported_by("G1", "S1"));
  g.add_edge(supported_by("S1", "G2"));
  g.add_edge(supported_by("G2", "Sn1"));
  g.add_edge(supported_by("G2", "Sn2"));
  return g;
}

}  // namespace

TEST_CASE("register stores records; inactive records are retained") {
  GuardrailRegistry reg;
  reg.register_guardrail(guardrail("perplexity_filter", Layer::L2_InputDetection,
                                   {AttackClass::GradientBased, AttackClass::Randomization}));
  reg.register_guardrail(guardrail("sql_injection_detector", Layer::L4_OutputDetection,
                                   {AttackClass::ModelInversion}));
  reg.register_guardrail(
      guardrail("retired_probe", Layer::L1_UpstreamInterface, {}, /*active=*/false));
  CHECK(reg.size() == 3);
  CHECK(reg.record("perplexity_filter").layer == Layer::L2_InputDetection);
  CHECK_FALSE(reg.record("retired_probe").active);
}

TEST_CASE("register rejects duplicates and active-with-empty-coverage") {
  GuardrailRegistry reg;
  reg.register_guardrail(guardrail("g1", Layer::L2_InputDetection, {AttackClass::Jailbreak}));
  CHECK_THROWS_AS(
      reg.register_guardrail(guardrail("g1", Layer::L2_InputDetection, {AttackClass::Jailbreak})),
      GsnError);
  try {
    reg.register_guardrail(guardrail("empty", Layer::L2_InputDetection, {}));
    FAIL("expected a throw");
  } catch (const GsnError& e) {
    CHECK(e.code() == ErrorCode::EmptyCoverageWhileActive);
  }
}

TEST_CASE("link_evidence is idempotent and type-checked") {
  GuardrailRegistry reg;
  reg.register_guardrail(guardrail("g1", Layer::L4_OutputDetection, {AttackClass::ModelInversion}));
  ArgumentGraph g = scoped_case({AttackClass::ModelInversion});

  reg.link_evidence(g, "Sn1", "g1");
  GuardrailRegistry before = reg;
  reg.link_evidence(g, "Sn1", "g1");
  CHECK(reg == before);

  CHECK_THROWS_AS(reg.link_evidence(g, "G1", "g1"), GsnError);      // NotASolution
  CHECK_THROWS_AS(reg.link_evidence(g, "Sn1", "nope"), GsnError);   // UnknownGuardrail
}

TEST_CASE("coverage gaps are scope minus linked active coverage") {
  GuardrailRegistry reg;
  reg.register_guardrail(guardrail("jb", Layer::L2_InputDetection, {AttackClass::Jailbreak}));
  ArgumentGraph g = scoped_case({AttackClass::Jailbreak, AttackClass::GradientBased});
  reg.link_evidence(g, "Sn1", "jb");

  auto gaps = coverage_gaps(reg, g);
  REQUIRE(gaps.size() == 1);
  CHECK(gaps[0].claim == "G1");
  CHECK(gaps[0].missing == AttackClass::GradientBased);

  reg.register_guardrail(guardrail("gb", Layer::L3_Model, {AttackClass::GradientBased}));
  reg.link_evidence(g, "Sn2", "gb");
  CHECK(coverage_gaps(reg, g).empty());

  // Deactivating the only guardrail covering jailbreak reopens that gap.
  reg.set_active("jb", false);
  auto reopened = coverage_gaps(reg, g);
  REQUIRE(reopened.size() == 1);
  CHECK(reopened[0].missing == AttackClass::Jailbreak);
}

TEST_CASE("links from another case do not count") {
  GuardrailRegistry reg;
  reg.register_guardrail(guardrail("jb", Layer::L2_InputDetection, {AttackClass::Jailbreak}));
  ArgumentGraph other("other_case");
  other.add_node(solution("Sn1"));
  reg.link_evidence(other, "Sn1", "jb");

  ArgumentGraph g = scoped_case({AttackClass::Jailbreak});
  REQUIRE(coverage_gaps(reg, g).size() == 1);
}

TEST_CASE("reconcile adds one open defeater per gap and is idempotent") {
  GuardrailRegistry reg;
  ArgumentGraph g = scoped_case({AttackClass::Jailbreak});

  ReconcileResult first = reconcile_defeaters(reg, g);
  REQUIRE(first.changes.size() == 2);
  CHECK(std::holds_alternative<AddNode>(first.changes.changes[0]));
  CHECK(std::holds_alternative<AddEdge>(first.changes.changes[1]));
  const Node& added = std::get<AddNode>(first.changes.changes[0]).node;
  CHECK(added.id == "AUTO-G1-jailbreak");
  CHECK(added.statement.find("jailbreak") != std::string::npos);

  apply(g, first.changes);
  CHECK(reconcile_defeaters(reg, g).changes.empty());
}

TEST_CASE("reconcile retires auto defeaters when the gap closes and reopens them later") {
  GuardrailRegistry reg;
  reg.register_guardrail(guardrail("jb", Layer::L2_InputDetection, {AttackClass::Jailbreak}));
  ArgumentGraph g = scoped_case({AttackClass::Jailbreak});
  reg.link_evidence(g, "Sn1", "jb");

  reg.set_active("jb", false);
  apply(g, reconcile_defeaters(reg, g).changes);
  CHECK(g.node("AUTO-G1-jailbreak").defeater_state == DefeaterState::Open);

  reg.set_active("jb", true);
  ReconcileResult retire = reconcile_defeaters(reg, g);
  REQUIRE(retire.changes.size() == 1);
  apply(g, retire.changes);
  CHECK(g.node("AUTO-G1-jailbreak").defeater_state == DefeaterState::Retired);
  CHECK(reconcile_defeaters(reg, g).changes.empty());

  reg.set_active("jb", false);
  ReconcileResult reopen = reconcile_defeaters(reg, g);
  REQUIRE(reopen.changes.size() == 1);
  apply(g, reopen.changes);
  CHECK(g.node("AUTO-G1-jailbreak").defeater_state == DefeaterState::Open);
}

TEST_CASE("reconcile never touches human-authored defeaters") {
  GuardrailRegistry reg;
  ArgumentGraph g = scoped_case({});
  g.add_node(defeater("CC1.5.5", DefeaterState::Open));
  g.add_edge(challenged_by("G1", "CC1.5.5"));
  g.add_node(defeater("AUTO-ish", DefeaterState::Open));  // no class suffix: human
  g.add_edge(challenged_by("G2", "AUTO-ish"));

  ReconcileResult result = reconcile_defeaters(reg, g);
  CHECK(result.changes.empty());
}

TEST_CASE("guardrails with no in-scope coverage become deprecation candidates") {
  GuardrailRegistry reg;
  reg.register_guardrail(
      guardrail("ctx_only", Layer::L4_OutputDetection, {AttackClass::ContextSwitching}));
  ArgumentGraph g = scoped_case({AttackClass::Jailbreak});
  reg.link_evidence(g, "Sn1", "ctx_only");

  ReconcileResult result = reconcile_defeaters(reg, g);
  REQUIRE(result.deprecation_candidates.size() == 1);
  CHECK(result.deprecation_candidates[0] == "ctx_only");

  // A guardrail covering an in-scope class is not a candidate.
  GuardrailRegistry reg2;
  reg2.register_guardrail(guardrail("jb", Layer::L2_InputDetection, {AttackClass::Jailbreak}));
  ArgumentGraph g2 = scoped_case({AttackClass::Jailbreak});
  reg2.link_evidence(g2, "Sn1", "jb");
  CHECK(reconcile_defeaters(reg2, g2).deprecation_candidates.empty());
}

TEST_CASE("auto defeater ids survive goals containing hyphens") {
  auto parsed = parse_auto_defeater_id("AUTO-claim-7-x-model_inversion");
  REQUIRE(parsed.has_value());
  CHECK(parsed->first == "claim-7-x");
  CHECK(parsed->second == AttackClass::ModelInversion);
  CHECK(!parse_auto_defeater_id("AUTO-claim").has_value());
  CHECK(!parse_auto_defeater_id("INC-1-G1").has_value());
}

TEST_CASE("registry text round-trips") {
  GuardrailRegistry reg;
  reg.register_guardrail(guardrail("perplexity_filter", Layer::L2_InputDetection,
                                   {AttackClass::GradientBased, AttackClass::Randomization}));
  ArgumentGraph g = scoped_case({AttackClass::GradientBased});
  reg.link_evidence(g, "Sn1", "perplexity_filter");

  std::string text = registry_to_text(reg);
  GuardrailRegistry loaded = registry_from_text(text);
  CHECK(loaded == reg);
  CHECK(registry_to_text(loaded) == text);
}

TEST_CASE("property: gap output matches brute-force enumeration") {
  std::mt19937_64 rng(53);
  for (int round = 0; round < 150; ++round) {
    ArgumentGraph g = random_graph(rng);

    // Random registry over the graph's solutions.
    GuardrailRegistry reg;
    std::vector<std::string> solutions;
    for (const auto& [id, n] : g.nodes())
      if (n.kind == NodeKind::Solution) solutions.push_back(id);
    std::uniform_int_distribution<int> count(0, 12);
    int guardrails = count(rng);
    for (int i = 0; i < guardrails; ++i) {
      std::set<AttackClass> coverage = detail::random_scope(rng);
      if (coverage.empty()) coverage.insert(AttackClass::Jailbreak);
      std::uniform_int_distribution<int> coin(0, 3);
      GuardrailRecord r = guardrail("gr" + std::to_string(i),
                                    static_cast<Layer>(i % 5), coverage, coin(rng) != 0);
      reg.register_guardrail(r);
      if (!solutions.empty() && coin(rng) != 0) {
        std::uniform_int_distribution<std::size_t> pick(0, solutions.size() - 1);
        reg.link_evidence(g, solutions[pick(rng)], r.id);
      }
    }

    auto gaps = coverage_gaps(reg, g);

    // Oracle: naive DFS closure + direct scan, computed independently.
    std::set<std::pair<std::string, int>> expected;
    for (const auto& [goal_id, node] : g.nodes()) {
      if (node.kind != NodeKind::Goal || node.scope.empty()) continue;
      std::set<std::string> closure;
      std::vector<std::string> stack{goal_id};
      while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        if (!closure.insert(cur).second) continue;
        for (const Edge& e : g.edges())
          if (e.kind == EdgeKind::SupportedBy && e.from == cur) stack.push_back(e.to);
      }
      for (AttackClass cls : node.scope) {
        bool covered = false;
        for (const auto& [gid, record] : reg.records()) {
          if (!record.active || !record.coverage.count(cls)) continue;
          for (const auto& [case_name, sol] : record.linked_solutions)
            if (case_name == g.name() && closure.count(sol) &&
                g.node(sol).kind == NodeKind::Solution)
              covered = true;
        }
        if (!covered) expected.emplace(goal_id, static_cast<int>(cls));
      }
    }

    std::set<std::pair<std::string, int>> actual;
    for (const CoverageGap& gap : gaps) actual.emplace(gap.claim, static_cast<int>(gap.missing));
    REQUIRE(actual == expected);  // soundness and completeness together

    // Reconciliation converges on arbitrary inputs.
    ArgumentGraph patched = g;
    apply(patched, reconcile_defeaters(reg, patched).changes);
    CHECK(reconcile_defeaters(reg, patched).changes.empty());
  }
}
