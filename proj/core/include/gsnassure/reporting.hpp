#pragma once
// Human-facing outputs: Graphviz DOT diagrams with GSN shape conventions and
// the EU AI Act compliance report over the two duties the framework computes
// (Art. 15(5) robustness, Art. 73 serious-incident reporting).

#include <string>
#include <vector>

#include "gsnassure/argument.hpp"
#include "gsnassure/evaluation.hpp"
#include "gsnassure/guardrails.hpp"
#include "gsnassure/incidents.hpp"

namespace gsn {

// Shapes: goal box, strategy parallelogram, solution circle, context rounded
// box, assumption/justification ellipse with an A/J tag, defeater octagon.
// Fill by status: supported palegreen, undeveloped lightgray, undercut
// orange, defeated tomato. Edges: supported_by solid, in_context_of empty
// arrowhead, challenged_by dashed, mitigated_by dotted. Deterministic
// ordering. Throws MismatchedAssignment when the assignment was not produced
// from this graph.
std::string export_dot(const ArgumentGraph& graph, const StatusAssignment& assignment);

enum class DutyRef { Article15_5, Article73 };
enum class DutyStatus { Satisfied, AtRisk, Violated };

const char* duty_ref_token(DutyRef ref);
const char* duty_status_token(DutyStatus status);

struct DutyEntry {
  DutyRef ref = DutyRef::Article15_5;
  DutyStatus status = DutyStatus::Satisfied;
  std::string rationale;
  std::vector<std::string> supporting_nodes;
};

struct ComplianceReport {
  std::string case_name;
  std::string top_claim;       // empty when the graph has no root goal
  Status top_status = Status::Undeveloped;
  std::vector<DutyEntry> duties;
  std::size_t open_defeaters = 0;
  std::size_t coverage_gap_count = 0;
  std::size_t tally_not_incident = 0;
  std::size_t tally_incident = 0;
  std::size_t tally_serious = 0;

  std::string to_text() const;
};

// Art. 15(5) derives from the top goal status (Supported -> Satisfied,
// Undeveloped/Undercut -> AtRisk, Defeated -> Violated); Art. 73 is Violated
// iff a serious incident lacks a generated report. The top claim is the
// first (numeric-aware) goal with no incoming SupportedBy or MitigatedBy
// edge. Throws MismatchedInputs when the assignment does not match the graph.
ComplianceReport compliance_report(const ArgumentGraph& graph,
                                   const StatusAssignment& assignment,
                                   const GuardrailRegistry& registry,
                                   const IncidentLedger& ledger);

// Security/robustness-related duties listed informatively (no computed
// status) alongside the two evaluated ones.
struct DutyNote {
  const char* reference;
  const char* label;
};
const std::vector<DutyNote>& informational_duties();

}  // namespace gsn
