#include <random>

#include "doctest.h"

#include "gsnassure/evaluation.hpp"
#include "support/builders.hpp"
#include "support/random_graph.hpp"

using namespace gsn;
using namespace gsn::test;

namespace {

// The automatic-attack fragment: G2.2 <- S2 <- {G2.2.1 <- S2.2.1A, G2.2.2 <- Sn2.2.2}.
ArgumentGraph fragment() {
  ArgumentGraph g("fragment");
  g.add_node(goal("G2.2", "automatic attacks mitigated"));
  g.add_node(strategy("S2", "argue over prompt patterns"));
  g.add_node(goal("G2.2.1", "perplexity filters in place"));
  g.add_node(goal("G2.2.2", "paraphrasing filters in place"));
  g.add_node(solution("S2.2.1A"));
  g.add_node(solution("Sn2.2.2"));
  g.add_edge(supported_by("G2.2", "S2"));
  g.add_edge(supported_by("S2", "G2.2.1"));
  g.add_edge(supported_by("S2", "G2.2.2"));
  g.add_edge(supported_by("G2.2.1", "S2.2.1A"));
  g.add_edge(supported_by("G2.2.2", "Sn2.2.2"));
  return g;
}

}  // namespace

TEST_CASE("a lone goal is undeveloped") {
  ArgumentGraph g;
  g.add_node(goal("G2", "claim", {}, true));
  StatusAssignment a = evaluate(g);
  CHECK(a.status_of("G2") == Status::Undeveloped);
  REQUIRE(a.at("G2").causes.size() == 1);
  CHECK(a.at("G2").causes[0].kind == CauseKind::NoSupport);
}

TEST_CASE("fully evidenced fragment is supported") {
  StatusAssignment a = evaluate(fragment());
  CHECK(a.status_of("G2.2") == Status::Supported);
  CHECK(a.status_of("S2") == Status::Supported);
  CHECK(a.status_of("G2.2.1") == Status::Supported);
  CHECK(a.at("G2.2").causes.empty());
}

TEST_CASE("open defeater defeats evidence and undercuts the chain; mitigation restores") {
  ArgumentGraph g = fragment();
  g.add_node(defeater("CG2.2.1", DefeaterState::Open, "patch errors unrepresented"));
  g.add_edge(challenged_by("S2.2.1A", "CG2.2.1"));

  StatusAssignment struck = evaluate(g);
  CHECK(struck.status_of("S2.2.1A") == Status::Defeated);
  CHECK(struck.status_of("G2.2.1") == Status::Undercut);
  CHECK(struck.status_of("G2.2") == Status::Undercut);
  CHECK(struck.status_of("G2.2.2") == Status::Supported);

  g.add_node(goal("S2.2.1B", "patch errors handled"));
  g.add_node(solution("Sn2.2.1B"));
  g.add_edge(supported_by("S2.2.1B", "Sn2.2.1B"));
  g.add_edge(mitigated_by("CG2.2.1", "S2.2.1B"));
  g.set_defeater_state("CG2.2.1", DefeaterState::Mitigated);

  StatusAssignment healed = evaluate(g);
  CHECK(healed.status_of("S2.2.1A") == Status::Supported);
  CHECK(healed.status_of("G2.2") == Status::Supported);
  CHECK(healed.status_of("CG2.2.1") == Status::Defeated);
}

TEST_CASE("a mitigated defeater with unsupported mitigation stays active") {
  ArgumentGraph g = fragment();
  g.add_node(defeater("D1", DefeaterState::Mitigated));
  g.add_edge(challenged_by("S2.2.1A", "D1"));
  g.add_node(goal("GM", "promised fix", {}, true));  // undeveloped mitigation
  g.add_edge(mitigated_by("D1", "GM"));
  StatusAssignment a = evaluate(g);
  CHECK(a.status_of("S2.2.1A") == Status::Defeated);
  CHECK(a.status_of("G2.2") == Status::Undercut);
}

TEST_CASE("one supported mitigation among several silences the challenge") {
  ArgumentGraph g = fragment();
  g.add_node(defeater("D1", DefeaterState::Mitigated));
  g.add_edge(challenged_by("S2.2.1A", "D1"));
  g.add_node(goal("GM1", "abandoned fix", {}, true));       // undeveloped
  g.add_node(goal("GM2", "landed fix"));
  g.add_node(solution("SnM2"));
  g.add_edge(supported_by("GM2", "SnM2"));
  g.add_edge(mitigated_by("D1", "GM1"));
  g.add_edge(mitigated_by("D1", "GM2"));

  StatusAssignment a = evaluate(g);
  CHECK(a.status_of("S2.2.1A") == Status::Supported);  // challenge answered
  CHECK(a.status_of("D1") == Status::Defeated);
  REQUIRE(a.at("D1").causes.size() == 1);
  CHECK(a.at("D1").causes[0].source == "GM2");

  // With every mitigation unproven the challenge bites again.
  g.set_evidence_valid("SnM2", false);
  StatusAssignment b = evaluate(g);
  CHECK(b.status_of("S2.2.1A") == Status::Defeated);
}

TEST_CASE("retired defeaters have no effect") {
  ArgumentGraph g = fragment();
  g.add_node(defeater("D1", DefeaterState::Retired));
  g.add_edge(challenged_by("S2.2.1A", "D1"));
  StatusAssignment a = evaluate(g);
  CHECK(a.status_of("S2.2.1A") == Status::Supported);
  CHECK(a.status_of("D1") == Status::Undeveloped);
}

TEST_CASE("invalid evidence undercuts a solution and its parents") {
  ArgumentGraph g = fragment();
  g.set_evidence_valid("S2.2.1A", false);
  StatusAssignment a = evaluate(g);
  CHECK(a.status_of("S2.2.1A") == Status::Undercut);
  REQUIRE(!a.at("S2.2.1A").causes.empty());
  CHECK(a.at("S2.2.1A").causes[0].kind == CauseKind::InvalidEvidence);
  CHECK(a.status_of("G2.2.1") == Status::Undercut);
}

TEST_CASE("undercut context caps its holder at undercut") {
  ArgumentGraph g = fragment();
  g.add_node(context("C1"));
  g.add_edge(in_context_of("G2.2", "C1"));
  g.add_node(defeater("D1", DefeaterState::Open));
  g.add_edge(challenged_by("C1", "D1"));
  StatusAssignment a = evaluate(g);
  CHECK(a.status_of("C1") == Status::Undercut);          // context, not defeated
  CHECK(a.status_of("G2.2") == Status::Undercut);        // via invalidated context
  bool found = false;
  for (const Cause& c : a.at("G2.2").causes)
    found = found || (c.kind == CauseKind::InvalidatedContext && c.source == "C1");
  CHECK(found);
}

TEST_CASE("defeaters on strategies undercut rather than defeat") {
  ArgumentGraph g = fragment();
  g.add_node(defeater("D1", DefeaterState::Open));
  g.add_edge(challenged_by("S2", "D1"));
  StatusAssignment a = evaluate(g);
  CHECK(a.status_of("S2") == Status::Undercut);
  CHECK(a.status_of("G2.2") == Status::Undercut);
}

TEST_CASE("evaluate rejects graphs with error diagnostics") {
  ArgumentGraph g;
  g.insert_node_unchecked(goal("G1"));
  g.insert_edge_unchecked(supported_by("G1", "GONE"));
  CHECK_THROWS_AS(evaluate(g), GsnError);
}

TEST_CASE("evaluate is deterministic") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 50; ++i) {
    ArgumentGraph g = random_graph(rng);
    CHECK(evaluate(g) == evaluate(g));
  }
}

TEST_CASE("explain returns a single node tree for supported leaves") {
  ArgumentGraph g = fragment();
  StatusAssignment a = evaluate(g);
  Explanation e = explain(a, "S2.2.1A");
  CHECK(e.id == "S2.2.1A");
  CHECK(e.status == Status::Supported);
  CHECK(e.causes.empty());
}

TEST_CASE("explain walks the undercut chain down to the defeater") {
  ArgumentGraph g = fragment();
  g.add_node(defeater("CG2.2.1", DefeaterState::Open));
  g.add_edge(challenged_by("S2.2.1A", "CG2.2.1"));
  StatusAssignment a = evaluate(g);
  Explanation e = explain(a, "G2.2");

  // Expected spine: G2.2 -> S2 -> G2.2.1 -> S2.2.1A -> CG2.2.1.
  std::vector<std::string> spine;
  const Explanation* cur = &e;
  while (cur) {
    spine.push_back(cur->id);
    const Explanation* next = nullptr;
    for (const ExplanationCause& c : cur->causes)
      if (!c.sub.empty()) { next = &c.sub.front(); break; }
    cur = next;
  }
  REQUIRE(spine.size() == 5);
  CHECK(spine == std::vector<std::string>{"G2.2", "S2", "G2.2.1", "S2.2.1A", "CG2.2.1"});
}

TEST_CASE("explain rejects unknown ids") {
  StatusAssignment a = evaluate(fragment());
  CHECK_THROWS_AS(explain(a, "ZZZ"), GsnError);
}

TEST_CASE("apply_and_reevaluate with an empty changeset returns the prior") {
  ArgumentGraph g = fragment();
  StatusAssignment prior = evaluate(g);
  StatusAssignment next = apply_and_reevaluate(g, prior, {});
  CHECK(next == prior);
}

TEST_CASE("apply_and_reevaluate rejects stale assignments") {
  ArgumentGraph g = fragment();
  StatusAssignment prior = evaluate(g);
  g.set_statement("G2.2", "changed behind the assignment's back");
  try {
    apply_and_reevaluate(g, prior, {});
    FAIL("expected a throw");
  } catch (const GsnError& e) {
    CHECK(e.code() == ErrorCode::StaleAssignment);
  }
}

TEST_CASE("apply_and_reevaluate rejects changes that do not apply") {
  ArgumentGraph g = fragment();
  StatusAssignment prior = evaluate(g);
  ChangeSet bad;
  bad.changes.push_back(RemoveNode{"G2.2"});  // still has edges
  try {
    apply_and_reevaluate(g, prior, bad);
    FAIL("expected a throw");
  } catch (const GsnError& e) {
    CHECK(e.code() == ErrorCode::InvalidChange);
  }
}

TEST_CASE("incremental update touches only dependents of the change") {
  ArgumentGraph g = fragment();
  StatusAssignment prior = evaluate(g);
  ChangeSet cs;
  Node d = defeater("DX", DefeaterState::Open);
  cs.changes.push_back(AddNode{d});
  cs.changes.push_back(AddEdge{challenged_by("Sn2.2.2", "DX")});
  StatusAssignment next = apply_and_reevaluate(g, prior, cs);

  CHECK(next.status_of("Sn2.2.2") == Status::Defeated);
  CHECK(next.status_of("G2.2.2") == Status::Undercut);
  CHECK(next.status_of("G2.2") == Status::Undercut);
  // Untouched branch keeps its exact prior entries.
  CHECK(next.at("G2.2.1") == prior.at("G2.2.1"));
  CHECK(next.at("S2.2.1A") == prior.at("S2.2.1A"));
  CHECK(next == evaluate(g));
}

TEST_CASE("property: incremental equals full re-evaluation") {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 300; ++i) {
    ArgumentGraph g = random_graph(rng);
    StatusAssignment prior = evaluate(g);
    ChangeSet cs = random_changeset(rng, g);
    StatusAssignment incremental = apply_and_reevaluate(g, prior, cs);
    REQUIRE(incremental == evaluate(g));
  }
}

TEST_CASE("property: defeater monotonicity at the target") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 200; ++i) {
    ArgumentGraph g = random_graph(rng);
    auto ids = g.sorted_ids();
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    const std::string target = ids[pick(rng)];
    if (g.node(target).kind == NodeKind::Defeater) continue;

    Status before = evaluate(g).status_of(target);
    ArgumentGraph worse = g;
    worse.add_node(defeater("STRIKE", DefeaterState::Open));
    worse.add_edge(challenged_by(target, "STRIKE"));
    Status after = evaluate(worse).status_of(target);
    CHECK(!more_severe(before, after));  // adding never improves

    // Removing the only open challenger never worsens the target.
    std::vector<std::string> open_challengers;
    for (const std::string& d : g.challengers(target))
      if (*g.node(d).defeater_state == DefeaterState::Open) open_challengers.push_back(d);
    if (open_challengers.size() == 1) {
      ArgumentGraph better = g;
      better.remove_edge(challenged_by(target, open_challengers[0]));
      Status relieved = evaluate(better).status_of(target);
      CHECK(!more_severe(relieved, before));
    }
  }
}

TEST_CASE("property: answered mitigated defeaters have zero effect elsewhere") {
  std::mt19937_64 rng(43);
  int exercised = 0;
  for (int i = 0; i < 200 && exercised < 40; ++i) {
    ArgumentGraph g = random_graph(rng);
    StatusAssignment a = evaluate(g);

    for (const auto& [id, node] : g.nodes()) {
      if (node.kind != NodeKind::Defeater) continue;
      if (*node.defeater_state != DefeaterState::Mitigated) continue;
      bool answered = false;
      for (const std::string& goal_id : g.mitigation_goals(id))
        answered = answered || a.status_of(goal_id) == Status::Supported;
      if (!answered) continue;

      ArgumentGraph without = g;
      for (const Edge& e : g.edges())
        if (e.from == id || e.to == id) without.remove_edge(e);
      without.remove_node(id);
      StatusAssignment b = evaluate(without);
      for (const auto& [other, st] : b.entries())
        REQUIRE(st == a.at(other));
      ++exercised;
      break;
    }
  }
  CHECK(exercised > 0);
}

TEST_CASE("property: full decomposition with valid leaves is all supported") {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 50; ++i) {
    ArgumentGraph g = fully_supported_graph(rng);
    StatusAssignment a = evaluate(g);
    for (const auto& [id, node] : g.nodes()) {
      CHECK(a.status_of(id) == Status::Supported);
    }
  }
}

TEST_CASE("assignment text form is stable and ordered") {
  ArgumentGraph g = fragment();
  StatusAssignment a = evaluate(g);
  std::string text = to_text(a);
  CHECK(text == to_text(evaluate(g)));
  CHECK(text.find("case: fragment\n") == 0);
  CHECK(text.find("G2.2: supported") != std::string::npos);
}
