#include "gsnassure/reporting.hpp"

#include <algorithm>
#include <sstream>

namespace gsn {

namespace {

std::string dot_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

const char* status_fill(Status status) {
  switch (status) {
    case Status::Supported: return "palegreen";
    case Status::Undeveloped: return "lightgray";
    case Status::Undercut: return "orange";
    case Status::Defeated: return "tomato";
  }
  return "white";
}

struct NodeStyle {
  const char* shape;
  const char* extra;  // extra attributes, may be empty
  const char* tag;    // label suffix line, may be empty
};

NodeStyle node_style(NodeKind kind) {
  switch (kind) {
    case NodeKind::Goal: return {"box", "", ""};
    case NodeKind::Strategy: return {"parallelogram", "", ""};
    case NodeKind::Solution: return {"circle", "", ""};
    case NodeKind::Context: return {"box", "style=\"rounded,filled\"", ""};
    case NodeKind::Assumption: return {"ellipse", "", "A"};
    case NodeKind::Justification: return {"ellipse", "", "J"};
    case NodeKind::Defeater: return {"octagon", "", ""};
  }
  return {"box", "", ""};
}

// Word-wrapped label: id on the first line, statement below.
std::string node_label(const Node& node) {
  std::string label = node.id + "\\n";
  std::size_t line_len = 0;
  std::istringstream words(node.statement);
  std::string word;
  bool first = true;
  while (words >> word) {
    if (!first && line_len + word.size() + 1 > 28) {
      label += "\\n";
      line_len = 0;
      first = true;
    }
    if (!first) {
      label += ' ';
      ++line_len;
    }
    label += dot_escape(word);
    line_len += word.size();
    first = false;
  }
  NodeStyle style = node_style(node.kind);
  if (style.tag[0] != '\0') label += std::string("\\n") + style.tag;
  return label;
}

const char* edge_attributes(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::SupportedBy: return "";
    case EdgeKind::InContextOf: return " [arrowhead=empty]";
    case EdgeKind::ChallengedBy: return " [style=dashed]";
    case EdgeKind::MitigatedBy: return " [style=dotted]";
  }
  return "";
}

}  // namespace

std::string export_dot(const ArgumentGraph& graph, const StatusAssignment& assignment) {
  if (assignment.fingerprint() != graph.fingerprint())
    throw GsnError(ErrorCode::MismatchedAssignment,
                   "status assignment was not produced from this graph");

  std::ostringstream os;
  os << "digraph \"" << dot_escape(graph.name()) << "\" {\n";
  os << "  rankdir=TB;\n";
  os << "  node [fontname=\"Helvetica\", fontsize=10];\n";

  for (const std::string& id : graph.sorted_ids()) {
    const Node& node = graph.node(id);
    NodeStyle style = node_style(node.kind);
    os << "  \"" << dot_escape(id) << "\" [shape=" << style.shape;
    if (style.extra[0] != '\0') os << ", " << style.extra;
    else os << ", style=filled";
    os << ", fillcolor=" << status_fill(assignment.status_of(id));
    os << ", label=\"" << node_label(node) << "\"];\n";
  }

  std::vector<Edge> edges(graph.edges().begin(), graph.edges().end());
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.from != b.from) return id_less(a.from, b.from);
    if (a.kind != b.kind) return a.kind < b.kind;
    return id_less(a.to, b.to);
  });
  for (const Edge& e : edges) {
    os << "  \"" << dot_escape(e.from) << "\" -> \"" << dot_escape(e.to) << "\""
       << edge_attributes(e.kind) << ";\n";
  }

  os << "}\n";
  return os.str();
}

const char* duty_ref_token(DutyRef ref) {
  switch (ref) {
    case DutyRef::Article15_5: return "Article 15(5)";
    case DutyRef::Article73: return "Article 73";
  }
  return "?";
}

const char* duty_status_token(DutyStatus status) {
  switch (status) {
    case DutyStatus::Satisfied: return "satisfied";
    case DutyStatus::AtRisk: return "at_risk";
    case DutyStatus::Violated: return "violated";
  }
  return "?";
}

namespace {

// First goal (numeric-aware order) nobody supports or mitigates into.
std::string find_top_claim(const ArgumentGraph& graph) {
  std::set<std::string> non_roots;
  for (const Edge& e : graph.edges())
    if (e.kind == EdgeKind::SupportedBy || e.kind == EdgeKind::MitigatedBy)
      non_roots.insert(e.to);
  for (const std::string& id : graph.sorted_ids()) {
    if (graph.node(id).kind == NodeKind::Goal && !non_roots.count(id)) return id;
  }
  return "";
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  return out;
}

}  // namespace

ComplianceReport compliance_report(const ArgumentGraph& graph,
                                   const StatusAssignment& assignment,
                                   const GuardrailRegistry& registry,
                                   const IncidentLedger& ledger) {
  if (assignment.fingerprint() != graph.fingerprint())
    throw GsnError(ErrorCode::MismatchedInputs,
                   "status assignment was not produced from this graph");

  ComplianceReport report;
  report.case_name = graph.name();
  report.top_claim = find_top_claim(graph);
  report.top_status =
      report.top_claim.empty() ? Status::Undeveloped : assignment.status_of(report.top_claim);

  std::vector<std::string> open_defeaters;
  for (const std::string& id : graph.sorted_ids()) {
    const Node& n = graph.node(id);
    if (n.kind == NodeKind::Defeater && *n.defeater_state == DefeaterState::Open)
      open_defeaters.push_back(id);
  }
  report.open_defeaters = open_defeaters.size();
  report.coverage_gap_count = coverage_gaps(registry, graph).size();
  report.tally_not_incident = ledger.count(Classification::NotIncident);
  report.tally_incident = ledger.count(Classification::Incident);
  report.tally_serious = ledger.count(Classification::SeriousIncident);

  // Art. 15(5): protection from adversarial attacks, read off the top claim.
  DutyEntry art15;
  art15.ref = DutyRef::Article15_5;
  switch (report.top_status) {
    case Status::Supported: art15.status = DutyStatus::Satisfied; break;
    case Status::Undeveloped:
    case Status::Undercut: art15.status = DutyStatus::AtRisk; break;
    case Status::Defeated: art15.status = DutyStatus::Violated; break;
  }
  if (report.top_claim.empty()) {
    art15.status = DutyStatus::AtRisk;
    art15.rationale = "no root goal found in the assurance case";
  } else {
    art15.rationale = "top claim " + report.top_claim + " evaluates " +
                      status_token(report.top_status);
    art15.supporting_nodes.push_back(report.top_claim);
    if (!open_defeaters.empty()) {
      art15.rationale += "; open challenges: " + join_ids(open_defeaters);
      for (const std::string& id : open_defeaters) art15.supporting_nodes.push_back(id);
    }
  }
  report.duties.push_back(std::move(art15));

  // Art. 73: every serious incident needs a generated report.
  DutyEntry art73;
  art73.ref = DutyRef::Article73;
  std::vector<std::string> unreported;
  for (const IncidentRecord& r : ledger.incidents()) {
    if (classify_incident(r) == Classification::SeriousIncident && !ledger.reported(r.id))
      unreported.push_back("#" + std::to_string(r.id));
  }
  if (unreported.empty()) {
    art73.status = DutyStatus::Satisfied;
    art73.rationale = report.tally_serious == 0
                          ? "no serious incidents recorded"
                          : "all serious incidents have generated reports";
  } else {
    art73.status = DutyStatus::Violated;
    art73.rationale = "serious incident(s) without a generated report: " + join_ids(unreported);
  }
  report.duties.push_back(std::move(art73));

  return report;
}

std::string ComplianceReport::to_text() const {
  std::ostringstream os;
  os << "COMPLIANCE REPORT\n=================\n";
  os << "case: " << case_name << "\n";
  if (top_claim.empty()) os << "top claim: (none)\n";
  else os << "top claim: " << top_claim << " (" << status_token(top_status) << ")\n";
  os << "\nDUTIES\n------\n";
  for (const DutyEntry& duty : duties) {
    os << duty_ref_token(duty.ref) << ": " << duty_status_token(duty.status) << "\n";
    os << "  rationale: " << duty.rationale << "\n";
    if (!duty.supporting_nodes.empty())
      os << "  supporting nodes: " << join_ids(duty.supporting_nodes) << "\n";
  }
  os << "\nSUMMARY\n-------\n";
  os << "open defeaters: " << open_defeaters << "\n";
  os << "coverage gaps: " << coverage_gap_count << "\n";
  os << "incidents: not_incident=" << tally_not_incident << " incident=" << tally_incident
     << " serious_incident=" << tally_serious << "\n";
  os << "\nINFORMATIONAL DUTIES (not evaluated)\n------------------------------------\n";
  for (const DutyNote& note : informational_duties())
    os << note.reference << " - " << note.label << "\n";
  return os.str();
}

const std::vector<DutyNote>& informational_duties() {
  static const std::vector<DutyNote> duties = {
      {"Article 9", "risk management system"},
      {"Article 10", "data and data governance"},
      {"Article 11", "technical documentation"},
      {"Article 12", "record-keeping"},
      {"Article 13", "transparency and provision of information to deployers"},
      {"Article 14", "human oversight"},
      {"Article 15(1)", "accuracy, robustness and cybersecurity lifecycle"},
      {"Article 15(4)", "resilience regarding errors, faults and inconsistencies"},
      {"Article 17", "quality management system"},
      {"Article 18", "documentation keeping"},
      {"Article 19", "automatically generated logs"},
      {"Article 20", "corrective actions and duty of information"},
      {"Article 25", "responsibilities along the AI value chain"},
      {"Article 26", "obligations of deployers"},
      {"Article 43", "conformity assessment"},
      {"Article 53", "obligations for providers of general-purpose AI models"},
      {"Article 55", "obligations for general-purpose AI models with systemic risk"},
      {"Article 72", "post-market monitoring"},
      {"Recital 155", "serious incident context"},
  };
  return duties;
}

}  // namespace gsn
