#include "gsnassure/guardrails.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gsn {

const char* layer_token(Layer layer) {
  switch (layer) {
    case Layer::L1_UpstreamInterface: return "L1";
    case Layer::L2_InputDetection: return "L2";
    case Layer::L3_Model: return "L3";
    case Layer::L4_OutputDetection: return "L4";
    case Layer::L5_Downstream: return "L5";
    case Layer::L6_ReasoningReporting: return "L6";
  }
  return "?";
}

const char* layer_description(Layer layer) {
  switch (layer) {
    case Layer::L1_UpstreamInterface: return "upstream interface";
    case Layer::L2_InputDetection: return "adversarial input detection";
    case Layer::L3_Model: return "model";
    case Layer::L4_OutputDetection: return "unintended output detection";
    case Layer::L5_Downstream: return "downstream interaction";
    case Layer::L6_ReasoningReporting: return "reasoning and reporting";
  }
  return "?";
}

std::optional<Layer> layer_from_token(std::string_view token) {
  for (int i = 0; i < 6; ++i) {
    Layer l = static_cast<Layer>(i);
    if (token == layer_token(l)) return l;
  }
  return std::nullopt;
}

const std::string& GuardrailRegistry::register_guardrail(const GuardrailRecord& record) {
  if (!valid_id(record.id))
    throw GsnError(ErrorCode::InvalidConfig, "invalid guardrail id '" + record.id + "'");
  if (record.active && record.coverage.empty())
    throw GsnError(ErrorCode::EmptyCoverageWhileActive,
                   "active guardrail '" + record.id + "' declares no coverage");
  auto [it, inserted] = records_.emplace(record.id, record);
  if (!inserted)
    throw GsnError(ErrorCode::DuplicateId, "guardrail '" + record.id + "' already registered");
  return it->first;
}

void GuardrailRegistry::set_active(const std::string& id, bool active) {
  auto it = records_.find(id);
  if (it == records_.end())
    throw GsnError(ErrorCode::UnknownGuardrail, "no guardrail '" + id + "'");
  if (active && it->second.coverage.empty())
    throw GsnError(ErrorCode::EmptyCoverageWhileActive,
                   "guardrail '" + id + "' declares no coverage");
  it->second.active = active;
}

void GuardrailRegistry::link_evidence(const ArgumentGraph& graph, const std::string& solution,
                                      const std::string& guardrail) {
  const Node* node = graph.find(solution);
  if (!node || node->kind != NodeKind::Solution)
    throw GsnError(ErrorCode::NotASolution, "'" + solution + "' is not a solution node");
  auto it = records_.find(guardrail);
  if (it == records_.end())
    throw GsnError(ErrorCode::UnknownGuardrail, "no guardrail '" + guardrail + "'");
  it->second.linked_solutions.emplace(graph.name(), solution);
}

const GuardrailRecord* GuardrailRegistry::find(const std::string& id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

const GuardrailRecord& GuardrailRegistry::record(const std::string& id) const {
  const GuardrailRecord* r = find(id);
  if (!r) throw GsnError(ErrorCode::UnknownGuardrail, "no guardrail '" + id + "'");
  return *r;
}

namespace {

// Solutions reachable from `goal` through SupportedBy edges.
std::set<std::string> solution_closure(const ArgumentGraph& graph, const std::string& goal) {
  std::set<std::string> solutions;
  std::set<std::string> seen;
  std::vector<std::string> stack{goal};
  while (!stack.empty()) {
    std::string cur = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(cur).second) continue;
    if (graph.node(cur).kind == NodeKind::Solution) solutions.insert(cur);
    for (std::string& child : graph.supported_children(cur)) stack.push_back(std::move(child));
  }
  return solutions;
}

std::set<AttackClass> covered_classes(const GuardrailRegistry& registry,
                                      const std::string& case_name,
                                      const std::set<std::string>& solutions) {
  std::set<AttackClass> covered;
  for (const auto& [_, record] : registry.records()) {
    if (!record.active) continue;
    bool linked = std::any_of(
        record.linked_solutions.begin(), record.linked_solutions.end(),
        [&](const auto& link) { return link.first == case_name && solutions.count(link.second); });
    if (linked) covered.insert(record.coverage.begin(), record.coverage.end());
  }
  return covered;
}

}  // namespace

std::vector<CoverageGap> coverage_gaps(const GuardrailRegistry& registry,
                                       const ArgumentGraph& graph) {
  std::vector<CoverageGap> gaps;
  for (const std::string& id : graph.sorted_ids()) {
    const Node& node = graph.node(id);
    if (node.kind != NodeKind::Goal || node.scope.empty()) continue;
    std::set<AttackClass> covered =
        covered_classes(registry, graph.name(), solution_closure(graph, id));
    for (AttackClass cls : node.scope)
      if (!covered.count(cls)) gaps.push_back({graph.name(), id, cls});
  }
  return gaps;
}

std::string auto_defeater_id(const std::string& goal, AttackClass cls) {
  return "AUTO-" + goal + "-" + attack_class_token(cls);
}

std::optional<std::pair<std::string, AttackClass>> parse_auto_defeater_id(std::string_view id) {
  if (!id.starts_with("AUTO-")) return std::nullopt;
  std::string_view rest = id.substr(5);
  // Class tokens contain no '-', so the suffix match is unambiguous even
  // though goal ids may contain '-'.
  for (int i = 0; i < kAttackClassCount; ++i) {
    AttackClass cls = static_cast<AttackClass>(i);
    std::string suffix = std::string("-") + attack_class_token(cls);
    if (rest.size() > suffix.size() && rest.ends_with(suffix))
      return std::make_pair(std::string(rest.substr(0, rest.size() - suffix.size())), cls);
  }
  return std::nullopt;
}

ReconcileResult reconcile_defeaters(const GuardrailRegistry& registry,
                                    const ArgumentGraph& graph) {
  ReconcileResult result;

  std::set<std::pair<std::string, AttackClass>> open_gaps;
  for (const CoverageGap& gap : coverage_gaps(registry, graph))
    open_gaps.emplace(gap.claim, gap.missing);

  for (const auto& [goal, cls] : open_gaps) {
    std::string id = auto_defeater_id(goal, cls);
    const Node* existing = graph.find(id);
    if (!existing) {
      Node defeater;
      defeater.id = id;
      defeater.kind = NodeKind::Defeater;
      defeater.defeater_state = DefeaterState::Open;
      defeater.statement = std::string("Coverage gap: attack class ") + attack_class_token(cls) +
                           " is in scope of " + goal +
                           " but no active linked guardrail covers it";
      result.changes.changes.push_back(AddNode{std::move(defeater)});
      result.changes.changes.push_back(AddEdge{Edge{goal, EdgeKind::ChallengedBy, id}});
    } else if (existing->kind == NodeKind::Defeater &&
               *existing->defeater_state == DefeaterState::Retired) {
      // Gap reopened after having been closed.
      result.changes.changes.push_back(SetDefeaterState{id, DefeaterState::Open});
    }
  }

  for (const auto& [id, node] : graph.nodes()) {
    if (node.kind != NodeKind::Defeater) continue;
    auto parsed = parse_auto_defeater_id(id);
    if (!parsed) continue;  // human-authored
    if (open_gaps.count(*parsed)) continue;
    if (*node.defeater_state != DefeaterState::Retired)
      result.changes.changes.push_back(SetDefeaterState{id, DefeaterState::Retired});
  }

  // Deprecation candidates: consider only guardrails linked into this case.
  for (const auto& [id, record] : registry.records()) {
    if (!record.active) continue;
    bool linked_here = false;
    std::set<AttackClass> in_scope;
    for (const auto& [case_name, solution] : record.linked_solutions) {
      if (case_name != graph.name()) continue;
      linked_here = true;
      for (const auto& [goal_id, goal] : graph.nodes()) {
        if (goal.kind != NodeKind::Goal || goal.scope.empty()) continue;
        if (solution_closure(graph, goal_id).count(solution))
          in_scope.insert(goal.scope.begin(), goal.scope.end());
      }
    }
    if (!linked_here) continue;
    bool useful = std::any_of(record.coverage.begin(), record.coverage.end(),
                              [&](AttackClass c) { return in_scope.count(c) != 0; });
    if (!useful) result.deprecation_candidates.push_back(id);
  }

  return result;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json record_to_json(const GuardrailRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["name"] = r.name;
  j["layer"] = layer_token(r.layer);
  ordered_json coverage = ordered_json::array();
  for (AttackClass c : r.coverage) coverage.push_back(attack_class_token(c));
  j["coverage"] = std::move(coverage);
  j["active"] = r.active;
  ordered_json links = ordered_json::array();
  for (const auto& [case_name, solution] : r.linked_solutions)
    links.push_back(ordered_json::array({case_name, solution}));
  j["linked_solutions"] = std::move(links);
  return j;
}

GuardrailRecord record_from_json(const ordered_json& j) {
  GuardrailRecord r;
  r.id = j.at("id").get<std::string>();
  r.name = j.at("name").get<std::string>();
  auto layer = layer_from_token(j.at("layer").get<std::string>());
  if (!layer) throw GsnError(ErrorCode::InvalidConfig, "unknown layer for '" + r.id + "'");
  r.layer = *layer;
  for (const auto& tok : j.at("coverage")) {
    auto cls = attack_class_from_token(tok.get<std::string>());
    if (!cls) throw GsnError(ErrorCode::InvalidConfig, "unknown attack class for '" + r.id + "'");
    r.coverage.insert(*cls);
  }
  r.active = j.at("active").get<bool>();
  if (j.contains("linked_solutions")) {
    for (const auto& link : j.at("linked_solutions"))
      r.linked_solutions.emplace(link.at(0).get<std::string>(), link.at(1).get<std::string>());
  }
  return r;
}

}  // namespace

std::string registry_to_text(const GuardrailRegistry& registry) {
  std::ostringstream os;
  for (const auto& [_, record] : registry.records()) os << record_to_json(record).dump() << "\n";
  return os.str();
}

GuardrailRegistry registry_from_text(const std::string& text) {
  GuardrailRegistry registry;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw GsnError(ErrorCode::InvalidConfig,
                     "registry line " + std::to_string(line_no) + " is not valid JSON");
    try {
      registry.register_guardrail(record_from_json(j));
    } catch (const ordered_json::exception& e) {
      throw GsnError(ErrorCode::InvalidConfig,
                     "registry line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return registry;
}

GuardrailRegistry load_registry(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GsnError(ErrorCode::IoError, "cannot read registry file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return registry_from_text(buffer.str());
}

void save_registry(const GuardrailRegistry& registry, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw GsnError(ErrorCode::IoError, "cannot write '" + tmp + "'");
    out << registry_to_text(registry);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw GsnError(ErrorCode::IoError, "cannot replace '" + path + "'");
}

}  // namespace gsn
