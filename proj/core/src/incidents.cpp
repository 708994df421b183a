#include "gsnassure/incidents.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gsn {

namespace {

constexpr std::array<const char*, kConsequenceClassCount> kConsequenceTokens = {
    "none",
    "ignored_or_prevented",
    "serious_health_damage_or_death",
    "critical_infrastructure_disruption",
    "fundamental_rights_infringement",
    "serious_property_or_environment_damage",
};

bool serious_consequence(ConsequenceClass cls) {
  return cls != ConsequenceClass::None && cls != ConsequenceClass::IgnoredOrPrevented;
}

}  // namespace

const char* consequence_token(ConsequenceClass cls) {
  return kConsequenceTokens[static_cast<int>(cls)];
}

const char* classification_token(Classification cls) {
  switch (cls) {
    case Classification::NotIncident: return "not_incident";
    case Classification::Incident: return "incident";
    case Classification::SeriousIncident: return "serious_incident";
  }
  return "?";
}

std::optional<ConsequenceClass> consequence_from_token(std::string_view token) {
  for (int i = 0; i < kConsequenceClassCount; ++i)
    if (token == kConsequenceTokens[i]) return static_cast<ConsequenceClass>(i);
  return std::nullopt;
}

Classification classify_incident(const IncidentEvent& event) {
  if (event.blocked_at.has_value() || !event.unintended) return Classification::NotIncident;
  return serious_consequence(event.consequence) ? Classification::SeriousIncident
                                                : Classification::Incident;
}

std::string classification_rationale(const IncidentEvent& event) {
  if (event.blocked_at.has_value())
    return std::string("blocked at ") + layer_token(*event.blocked_at) +
           " -> not an incident (no output delivered)";
  if (!event.unintended) return "delivered but intended output -> not an incident";
  if (!serious_consequence(event.consequence))
    return std::string("delivered + unintended + consequence ") +
           consequence_token(event.consequence) + " -> incident (not serious)";
  return std::string("delivered + unintended + consequence ") +
         consequence_token(event.consequence) + " -> serious incident (Art. 3(49) class)";
}

namespace {

// Loose ISO-8601 shape check: YYYY-MM-DDThh:mm:ss with optional suffix.
bool plausible_timestamp(const std::string& ts) {
  if (ts.size() < 19) return false;
  auto digit = [&](std::size_t i) { return std::isdigit(static_cast<unsigned char>(ts[i])); };
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u, 11u, 12u, 14u, 15u, 17u, 18u})
    if (!digit(i)) return false;
  return ts[4] == '-' && ts[7] == '-' && (ts[10] == 'T' || ts[10] == ' ') && ts[13] == ':' &&
         ts[16] == ':';
}

}  // namespace

void check_event(const IncidentEvent& event) {
  if (!plausible_timestamp(event.timestamp))
    throw GsnError(ErrorCode::MalformedEvent,
                   "timestamp '" + event.timestamp + "' is not ISO-8601");
  if (event.blocked_at && *event.blocked_at == Layer::L6_ReasoningReporting)
    throw GsnError(ErrorCode::MalformedEvent,
                   "blocked_at must name a runtime layer (L1..L5)");
  if (event.blocked_at && serious_consequence(event.consequence))
    throw GsnError(ErrorCode::MalformedEvent,
                   "blocked output cannot cause a downstream consequence");
  if (event.session && event.session->empty())
    throw GsnError(ErrorCode::MalformedEvent, "session token present but empty");
}

std::uint64_t IncidentLedger::record_incident(const IncidentEvent& event) {
  check_event(event);
  IncidentRecord record;
  static_cast<IncidentEvent&>(record) = event;
  record.id = incidents_.size() + 1;
  incidents_.push_back(std::move(record));
  rows_.push_back(incident_line(incidents_.back()));
  return incidents_.back().id;
}

bool IncidentLedger::reported(std::uint64_t id) const {
  return std::any_of(report_marks_.begin(), report_marks_.end(),
                     [&](const auto& mark) { return mark.first == id; });
}

const IncidentRecord& IncidentLedger::incident(std::uint64_t id) const {
  if (id == 0 || id > incidents_.size())
    throw GsnError(ErrorCode::UnknownIncident, "no incident #" + std::to_string(id));
  return incidents_[id - 1];
}

std::size_t IncidentLedger::count(Classification cls) const {
  return static_cast<std::size_t>(
      std::count_if(incidents_.begin(), incidents_.end(),
                    [&](const IncidentRecord& r) { return classify_incident(r) == cls; }));
}

std::size_t IncidentLedger::count_class(AttackClass cls) const {
  return static_cast<std::size_t>(
      std::count_if(incidents_.begin(), incidents_.end(),
                    [&](const IncidentRecord& r) { return r.attack_class == cls; }));
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json record_json(const IncidentRecord& r) {
  ordered_json j;
  j["type"] = "incident";
  j["id"] = r.id;
  j["timestamp"] = r.timestamp;
  j["attack_class"] = attack_class_token(r.attack_class);
  if (r.blocked_at) j["blocked_at"] = layer_token(*r.blocked_at);
  else j["blocked_at"] = nullptr;
  j["unintended"] = r.unintended;
  j["consequence"] = consequence_token(r.consequence);
  if (r.session) j["session"] = *r.session;
  else j["session"] = nullptr;
  j["notes"] = r.notes;
  return j;
}

}  // namespace

std::string incident_line(const IncidentRecord& record) { return record_json(record).dump(); }

std::string report_marker_line(std::uint64_t incident, const std::string& timestamp) {
  ordered_json j;
  j["type"] = "report";
  j["incident"] = incident;
  j["timestamp"] = timestamp;
  return j.dump();
}

void IncidentLedger::mark_reported(std::uint64_t id, const std::string& timestamp) {
  incident(id);  // throws UnknownIncident
  if (reported(id)) return;
  report_marks_.emplace_back(id, timestamp);
  rows_.push_back(report_marker_line(id, timestamp));
}

std::string IncidentLedger::to_text() const {
  // Rows are kept in append order, so a ledger's text is always a strict
  // prefix of the text after one more append.
  std::ostringstream os;
  for (const std::string& row : rows_) os << row << "\n";
  return os.str();
}

IncidentLedger IncidentLedger::from_text(const std::string& text) {
  IncidentLedger ledger;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw GsnError(ErrorCode::InvalidConfig,
                     "ledger line " + std::to_string(line_no) + " is not valid JSON");
    try {
      std::string type = j.value("type", "incident");
      if (type == "report") {
        ledger.mark_reported(j.at("incident").get<std::uint64_t>(),
                             j.at("timestamp").get<std::string>());
        continue;
      }
      IncidentEvent event;
      event.timestamp = j.at("timestamp").get<std::string>();
      auto cls = attack_class_from_token(j.at("attack_class").get<std::string>());
      if (!cls)
        throw GsnError(ErrorCode::InvalidConfig,
                       "ledger line " + std::to_string(line_no) + ": unknown attack class");
      event.attack_class = *cls;
      if (!j.at("blocked_at").is_null()) {
        auto layer = layer_from_token(j.at("blocked_at").get<std::string>());
        if (!layer)
          throw GsnError(ErrorCode::InvalidConfig,
                         "ledger line " + std::to_string(line_no) + ": unknown layer");
        event.blocked_at = layer;
      }
      event.unintended = j.at("unintended").get<bool>();
      auto consequence = consequence_from_token(j.at("consequence").get<std::string>());
      if (!consequence)
        throw GsnError(ErrorCode::InvalidConfig,
                       "ledger line " + std::to_string(line_no) + ": unknown consequence");
      event.consequence = *consequence;
      if (j.contains("session") && !j.at("session").is_null())
        event.session = j.at("session").get<std::string>();
      event.notes = j.value("notes", "");
      std::uint64_t declared = j.at("id").get<std::uint64_t>();
      std::uint64_t assigned = ledger.record_incident(event);
      if (declared != assigned)
        throw GsnError(ErrorCode::InvalidConfig,
                       "ledger line " + std::to_string(line_no) + ": ids must be gapless (expected " +
                           std::to_string(assigned) + ", found " + std::to_string(declared) + ")");
    } catch (const ordered_json::exception& e) {
      throw GsnError(ErrorCode::InvalidConfig,
                     "ledger line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return ledger;
}

IncidentLedger load_ledger(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return IncidentLedger{};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return IncidentLedger::from_text(buffer.str());
}

void append_ledger_line(const std::string& path, const std::string& line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw GsnError(ErrorCode::IoError, "cannot append to ledger '" + path + "'");
  out << line << "\n";
}

std::string incident_defeater_id(std::uint64_t incident, const std::string& goal) {
  return "INC-" + std::to_string(incident) + "-" + goal;
}

ChangeSet trigger_defeaters(const IncidentLedger& ledger, const ArgumentGraph& graph) {
  ChangeSet out;
  for (const IncidentRecord& record : ledger.incidents()) {
    if (classify_incident(record) == Classification::NotIncident) continue;
    for (const std::string& goal_id : graph.sorted_ids()) {
      const Node& goal = graph.node(goal_id);
      if (goal.kind != NodeKind::Goal || !goal.scope.count(record.attack_class)) continue;
      std::string id = incident_defeater_id(record.id, goal_id);
      if (graph.contains(id)) continue;
      Node defeater;
      defeater.id = id;
      defeater.kind = NodeKind::Defeater;
      defeater.defeater_state = DefeaterState::Open;
      defeater.statement = "Incident #" + std::to_string(record.id) + " (" +
                           attack_class_token(record.attack_class) +
                           ", delivered unintended output) falls in the scope of " + goal_id;
      out.changes.push_back(AddNode{std::move(defeater)});
      out.changes.push_back(AddEdge{Edge{goal_id, EdgeKind::ChallengedBy, id}});
    }
  }
  return out;
}

namespace {

void heading(std::ostringstream& os, const std::string& title) {
  os << title << "\n" << std::string(title.size(), '-') << "\n";
}

}  // namespace

std::string generate_serious_report(IncidentLedger& ledger, std::uint64_t id,
                                    const ArgumentGraph* graph,
                                    const StatusAssignment* assignment,
                                    const std::string& report_timestamp) {
  const IncidentRecord& record = ledger.incident(id);
  Classification cls = classify_incident(record);
  if (cls != Classification::SeriousIncident)
    throw GsnError(ErrorCode::NotSerious, "incident #" + std::to_string(id) + " classifies as " +
                                              classification_token(cls));

  std::ostringstream os;
  os << "SERIOUS INCIDENT REPORT\n=======================\n";

  heading(os, "INCIDENT FACTS");
  os << "incident: #" << record.id << "\n";
  os << "timestamp: " << record.timestamp << "\n";
  os << "attack class: " << attack_class_token(record.attack_class) << "\n";
  os << "unintended output: yes\n";
  os << "consequence: " << consequence_token(record.consequence) << "\n";
  os << "session: " << (record.session ? *record.session : "(none)") << "\n";
  os << "notes: " << (record.notes.empty() ? "(none)" : record.notes) << "\n\n";

  heading(os, "CLASSIFICATION");
  os << classification_token(cls) << "\n";
  os << "rule: " << classification_rationale(record) << "\n\n";

  heading(os, "LAYER TRACE");
  os << "delivered: no configured layer blocked the attempt\n\n";

  heading(os, "LINKED DEFEATERS");
  bool any_defeater = false;
  if (graph) {
    std::string prefix = "INC-" + std::to_string(record.id) + "-";
    for (const std::string& node_id : graph->sorted_ids()) {
      if (node_id.rfind(prefix, 0) != 0) continue;
      const Node& n = graph->node(node_id);
      if (n.kind != NodeKind::Defeater) continue;
      any_defeater = true;
      os << node_id << " (" << defeater_state_token(*n.defeater_state) << ")";
      for (const Edge& e : graph->edges())
        if (e.kind == EdgeKind::ChallengedBy && e.to == node_id) os << " challenging " << e.from;
      os << "\n";
    }
  }
  if (!any_defeater) os << (graph ? "(none)" : "(no assurance case supplied)") << "\n";
  os << "\n";

  heading(os, "AFFECTED CLAIMS");
  bool any_claim = false;
  if (graph && assignment) {
    for (const std::string& node_id : graph->sorted_ids()) {
      const Node& n = graph->node(node_id);
      if (n.kind != NodeKind::Goal || !n.scope.count(record.attack_class)) continue;
      any_claim = true;
      os << node_id << ": "
         << (assignment->contains(node_id) ? status_token(assignment->status_of(node_id)) : "?")
         << "\n";
    }
  }
  if (!any_claim) os << (graph ? "(none in scope)" : "(no assurance case supplied)") << "\n";
  os << "\n";

  heading(os, "REPETITION");
  os << "incidents with attack class " << attack_class_token(record.attack_class) << ": "
     << ledger.count_class(record.attack_class) << "\n\n";

  heading(os, "SYSTEMIC RISK CONSIDERATIONS (free text)");
  os << "(record Art. 3(65) considerations here; no decision rule is applied)\n\n";

  heading(os, "INVESTIGATION CHECKLIST");
  os << "[ ] identify the layer(s) whose guardrails the input traversed\n";
  os << "[ ] reproduce the attack pattern and record the prompt family\n";
  os << "[ ] review coverage claims of guardrails linked to the affected goals\n";
  os << "[ ] author or update defeaters and mitigations in the assurance case\n";
  os << "[ ] notify the supervisory authority per Article 73 timelines\n";

  ledger.mark_reported(id, report_timestamp.empty() ? record.timestamp : report_timestamp);
  return os.str();
}

}  // namespace gsn
