#include "doctest.h"

#include "gsnassure/incidents.hpp"
#include "support/builders.hpp"

using namespace gsn;
using namespace gsn::test;

namespace {

IncidentEvent event(AttackClass cls, std::optional<Layer> blocked, bool unintended,
                    ConsequenceClass consequence) {
  IncidentEvent e;
  e.timestamp = "2026-02-03T04:05:06Z";
  e.attack_class = cls;
  e.blocked_at = blocked;
  e.unintended = unintended;
  e.consequence = consequence;
  return e;
}

}  // namespace

TEST_CASE("first append gets id 1; blocked layer is stored") {
  IncidentLedger ledger;
  CHECK(ledger.record_incident(event(AttackClass::Jailbreak, std::nullopt, true,
                                     ConsequenceClass::None)) == 1);
  CHECK(ledger.record_incident(event(AttackClass::Jailbreak, Layer::L2_InputDetection, true,
                                     ConsequenceClass::None)) == 2);
  CHECK(ledger.incident(2).blocked_at == Layer::L2_InputDetection);
  CHECK(ledger.size() == 2);
}

TEST_CASE("blocked events cannot carry downstream consequences") {
  IncidentLedger ledger;
  try {
    ledger.record_incident(event(AttackClass::Jailbreak, Layer::L2_InputDetection, true,
                                 ConsequenceClass::SeriousHealthDamageOrDeath));
    FAIL("expected a throw");
  } catch (const GsnError& e) {
    CHECK(e.code() == ErrorCode::MalformedEvent);
  }
  CHECK_THROWS_AS(ledger.record_incident(event(AttackClass::Jailbreak,
                                               Layer::L6_ReasoningReporting, true,
                                               ConsequenceClass::None)),
                  GsnError);
  IncidentEvent bad_ts = event(AttackClass::Jailbreak, std::nullopt, true, ConsequenceClass::None);
  bad_ts.timestamp = "yesterday";
  CHECK_THROWS_AS(ledger.record_incident(bad_ts), GsnError);
  CHECK(ledger.size() == 0);
}

TEST_CASE("classification decision table is exhaustive over consistent rows") {
  const std::optional<Layer> deliveries[] = {std::nullopt,
                                             std::optional<Layer>(Layer::L2_InputDetection)};
  for (const auto& blocked : deliveries) {
    for (bool unintended : {false, true}) {
      for (int c = 0; c < kConsequenceClassCount; ++c) {
        ConsequenceClass consequence = static_cast<ConsequenceClass>(c);
        IncidentEvent e = event(AttackClass::Randomization, blocked, unintended, consequence);
        bool serious_consequence = consequence != ConsequenceClass::None &&
                                   consequence != ConsequenceClass::IgnoredOrPrevented;
        if (blocked && serious_consequence) {
          CHECK_THROWS_AS(check_event(e), GsnError);  // inconsistent row
          continue;
        }
        Classification got = classify_incident(e);
        if (blocked || !unintended) CHECK(got == Classification::NotIncident);
        else if (!serious_consequence) CHECK(got == Classification::Incident);
        else CHECK(got == Classification::SeriousIncident);
      }
    }
  }
}

TEST_CASE("classification of the named decision rows") {
  CHECK(classify_incident(event(AttackClass::Jailbreak, std::nullopt, true,
                                ConsequenceClass::None)) == Classification::Incident);
  CHECK(classify_incident(event(AttackClass::Jailbreak, std::nullopt, true,
                                ConsequenceClass::IgnoredOrPrevented)) ==
        Classification::Incident);
  CHECK(classify_incident(event(AttackClass::Jailbreak, std::nullopt, true,
                                ConsequenceClass::SeriousHealthDamageOrDeath)) ==
        Classification::SeriousIncident);
  // False positive: legitimate prompt blocked, recorded but not an incident.
  CHECK(classify_incident(event(AttackClass::Jailbreak, Layer::L2_InputDetection, false,
                                ConsequenceClass::None)) == Classification::NotIncident);
}

TEST_CASE("ledger text is append-only: each serialization is a prefix of the next") {
  IncidentLedger ledger;
  std::string previous = ledger.to_text();
  for (int i = 0; i < 6; ++i) {
    ledger.record_incident(event(AttackClass::HeuristicOptimization, std::nullopt, true,
                                 i % 2 ? ConsequenceClass::FundamentalRightsInfringement
                                       : ConsequenceClass::None));
    std::string current = ledger.to_text();
    CHECK(current.size() > previous.size());
    CHECK(current.substr(0, previous.size()) == previous);
    previous = current;
    if (i % 2) {
      generate_serious_report(ledger, ledger.size());
      std::string with_mark = ledger.to_text();
      CHECK(with_mark.substr(0, previous.size()) == previous);
      previous = with_mark;
    }
  }
}

TEST_CASE("ledger round-trips through its text form") {
  IncidentLedger ledger;
  ledger.record_incident(event(AttackClass::Jailbreak, std::nullopt, true,
                               ConsequenceClass::SeriousHealthDamageOrDeath));
  IncidentEvent with_session = event(AttackClass::ModelInversion, Layer::L4_OutputDetection,
                                     false, ConsequenceClass::None);
  with_session.session = "sess-1";
  with_session.notes = "observed in canary";
  ledger.record_incident(with_session);
  generate_serious_report(ledger, 1, nullptr, nullptr, "2026-02-04T00:00:00Z");

  IncidentLedger loaded = IncidentLedger::from_text(ledger.to_text());
  CHECK(loaded.size() == 2);
  CHECK(loaded.incident(2).session == std::optional<std::string>("sess-1"));
  CHECK(loaded.reported(1));
  CHECK_FALSE(loaded.reported(2));
  CHECK(loaded.to_text() == ledger.to_text());

  CHECK_THROWS_AS(IncidentLedger::from_text("{\"type\":\"incident\",\"id\":5}"), GsnError);
}

TEST_CASE("trigger_defeaters targets scoped goals for delivered incidents only") {
  ArgumentGraph g("natural_language");
  g.add_node(goal("G2.1", "manual attacks mitigated", {AttackClass::Jailbreak}, true));
  g.add_node(goal("G2.2", "automatic attacks mitigated", {AttackClass::GradientBased}, true));

  IncidentLedger ledger;
  ledger.record_incident(event(AttackClass::Jailbreak, std::nullopt, true,
                               ConsequenceClass::None));                     // incident
  ledger.record_incident(event(AttackClass::Jailbreak, Layer::L2_InputDetection, true,
                               ConsequenceClass::None));                     // blocked
  ledger.record_incident(event(AttackClass::ContextSwitching, std::nullopt, true,
                               ConsequenceClass::None));                     // out of scope

  ChangeSet cs = trigger_defeaters(ledger, g);
  REQUIRE(cs.size() == 2);
  const Node& added = std::get<AddNode>(cs.changes[0]).node;
  CHECK(added.id == "INC-1-G2.1");
  CHECK(added.statement.find("#1") != std::string::npos);
  CHECK(std::get<AddEdge>(cs.changes[1]).edge.from == "G2.1");

  apply(g, cs);
  CHECK(trigger_defeaters(ledger, g).empty());  // idempotent

  // Human defeaters are untouched by retriggering.
  g.add_node(defeater("CG-manual", DefeaterState::Open));
  g.add_edge(challenged_by("G2.1", "CG-manual"));
  CHECK(trigger_defeaters(ledger, g).empty());
}

TEST_CASE("serious reports carry the consequence, the fired rule, and repetition") {
  IncidentLedger ledger;
  ledger.record_incident(event(AttackClass::Jailbreak, std::nullopt, true,
                               ConsequenceClass::CriticalInfrastructureDisruption));
  ledger.record_incident(event(AttackClass::Jailbreak, std::nullopt, true,
                               ConsequenceClass::None));

  std::string doc = generate_serious_report(ledger, 1, nullptr, nullptr, "2026-02-05T00:00:00Z");
  CHECK(doc.find("critical_infrastructure_disruption") != std::string::npos);
  CHECK(doc.find("serious incident (Art. 3(49) class)") != std::string::npos);
  CHECK(doc.find("incidents with attack class jailbreak: 2") != std::string::npos);
  CHECK(doc.find("INVESTIGATION CHECKLIST") != std::string::npos);
  CHECK(ledger.reported(1));

  try {
    generate_serious_report(ledger, 2);
    FAIL("expected a throw");
  } catch (const GsnError& e) {
    CHECK(e.code() == ErrorCode::NotSerious);
  }
  try {
    generate_serious_report(ledger, 999);
    FAIL("expected a throw");
  } catch (const GsnError& e) {
    CHECK(e.code() == ErrorCode::UnknownIncident);
  }
}

TEST_CASE("serious reports list linked defeaters and affected claims when a case is given") {
  ArgumentGraph g("nl");
  g.add_node(goal("G1", "jailbreaks mitigated", {AttackClass::Jailbreak}, true));
  IncidentLedger ledger;
  ledger.record_incident(event(AttackClass::Jailbreak, std::nullopt, true,
                               ConsequenceClass::SeriousPropertyOrEnvironmentDamage));
  apply(g, trigger_defeaters(ledger, g));
  StatusAssignment a = evaluate(g);

  std::string doc = generate_serious_report(ledger, 1, &g, &a, "2026-02-05T00:00:00Z");
  CHECK(doc.find("INC-1-G1 (open) challenging G1") != std::string::npos);
  CHECK(doc.find("G1: defeated") != std::string::npos);
}

TEST_CASE("every stored serious incident yields a generable report; others never do") {
  IncidentLedger ledger;
  ledger.record_incident(event(AttackClass::Randomization, std::nullopt, true,
                               ConsequenceClass::FundamentalRightsInfringement));
  ledger.record_incident(event(AttackClass::Randomization, std::nullopt, true,
                               ConsequenceClass::SeriousHealthDamageOrDeath));
  ledger.record_incident(event(AttackClass::Randomization, Layer::L1_UpstreamInterface, false,
                               ConsequenceClass::None));  // not an incident
  for (const IncidentRecord& r : ledger.incidents()) {
    if (classify_incident(r) == Classification::SeriousIncident) {
      CHECK(!generate_serious_report(ledger, r.id, nullptr, nullptr, r.timestamp).empty());
    } else {
      CHECK_THROWS_AS(generate_serious_report(ledger, r.id), GsnError);
    }
  }
  CHECK(ledger.count(Classification::SeriousIncident) == 2);
  CHECK(ledger.count(Classification::NotIncident) == 1);
}
