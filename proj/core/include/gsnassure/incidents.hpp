#pragma once
// Append-only ledger of adversarial events with EU AI Act classification.
//
// An event is an incident when unintended output was actually delivered
// (blocked_at absent, unintended true); it is serious when the downstream
// consequence falls in one of the four Art. 3(49) classes. Blocked events and
// intended output classify NotIncident but stay recorded and queryable.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gsnassure/argument.hpp"
#include "gsnassure/changeset.hpp"
#include "gsnassure/evaluation.hpp"
#include "gsnassure/guardrails.hpp"

namespace gsn {

enum class ConsequenceClass {
  None,
  IgnoredOrPrevented,
  SeriousHealthDamageOrDeath,
  CriticalInfrastructureDisruption,
  FundamentalRightsInfringement,
  SeriousPropertyOrEnvironmentDamage,
};

inline constexpr int kConsequenceClassCount = 6;

enum class Classification { NotIncident, Incident, SeriousIncident };

const char* consequence_token(ConsequenceClass cls);
const char* classification_token(Classification cls);
std::optional<ConsequenceClass> consequence_from_token(std::string_view token);

// An event as submitted; the ledger assigns ids.
struct IncidentEvent {
  std::string timestamp;                  // ISO-8601
  AttackClass attack_class = AttackClass::Jailbreak;
  std::optional<Layer> blocked_at;        // absent = output delivered
  bool unintended = false;
  ConsequenceClass consequence = ConsequenceClass::None;
  std::optional<std::string> session;
  std::string notes;

  friend bool operator==(const IncidentEvent&, const IncidentEvent&) = default;
};

struct IncidentRecord : IncidentEvent {
  std::uint64_t id = 0;  // 1-based, gapless

  friend bool operator==(const IncidentRecord&, const IncidentRecord&) = default;
};

// Pure decision table:
//   blocked or intended                          -> NotIncident
//   delivered + unintended + {None, IgnoredOrPrevented} -> Incident
//   delivered + unintended + an Art. 3(49) class        -> SeriousIncident
Classification classify_incident(const IncidentEvent& event);

// One-line description of the decision-table row that fired.
std::string classification_rationale(const IncidentEvent& event);

// Throws MalformedEvent: blocked_at outside L1..L5, bad timestamp, or a
// blocked event carrying an Art. 3(49) consequence.
void check_event(const IncidentEvent& event);

class IncidentLedger {
public:
  // Appends with the next id; returns it. Throws MalformedEvent.
  std::uint64_t record_incident(const IncidentEvent& event);

  // Marks a serious-incident report as generated (append-only marker row).
  void mark_reported(std::uint64_t id, const std::string& timestamp);
  bool reported(std::uint64_t id) const;

  const std::vector<IncidentRecord>& incidents() const { return incidents_; }
  const IncidentRecord& incident(std::uint64_t id) const;  // throws UnknownIncident
  std::size_t size() const { return incidents_.size(); }

  std::size_t count(Classification cls) const;
  std::size_t count_class(AttackClass cls) const;

  // Line-delimited JSON; a serialized ledger is a strict prefix of the same
  // ledger after one more append.
  std::string to_text() const;
  static IncidentLedger from_text(const std::string& text);  // throws InvalidConfig

private:
  std::vector<IncidentRecord> incidents_;
  std::vector<std::pair<std::uint64_t, std::string>> report_marks_;
  std::vector<std::string> rows_;  // canonical lines in append order
};

IncidentLedger load_ledger(const std::string& path);  // missing file = empty ledger
void append_ledger_line(const std::string& path, const std::string& line);

// One Open defeater `INC-<id>-<goal>` per (incident, goal whose scope holds
// the attack class); idempotent, human defeaters untouched.
ChangeSet trigger_defeaters(const IncidentLedger& ledger, const ArgumentGraph& graph);

std::string incident_defeater_id(std::uint64_t incident, const std::string& goal);

// Structured plain-text Art. 73 report; marks the incident as reported.
// Throws UnknownIncident / NotSerious. Graph and assignment are optional
// enrichment (linked defeaters, affected claims and statuses).
std::string generate_serious_report(IncidentLedger& ledger, std::uint64_t id,
                                    const ArgumentGraph* graph = nullptr,
                                    const StatusAssignment* assignment = nullptr,
                                    const std::string& report_timestamp = "");

// Serialized rows, used for file-level appends.
std::string incident_line(const IncidentRecord& record);
std::string report_marker_line(std::uint64_t incident, const std::string& timestamp);

}  // namespace gsn
