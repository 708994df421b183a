#include <algorithm>
#include <sstream>

#include "gsnassure/dsl.hpp"

namespace gsn {

namespace {

std::string quoted(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

void emit_id_list(std::ostringstream& os, const char* keyword,
                  const std::vector<std::string>& ids) {
  if (ids.empty()) return;
  os << " " << keyword << " ";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) os << ", ";
    os << ids[i];
  }
}

}  // namespace

std::string print(const ArgumentGraph& graph) {
  for (const Diagnostic& d : graph.validate()) {
    if (d.severity == Severity::Error)
      throw GsnError(ErrorCode::InvalidGraph, "cannot print: " + d.message +
                                                  (d.node.empty() ? "" : " ('" + d.node + "')"));
  }

  std::ostringstream os;
  os << "case " << quoted(graph.name()) << " {\n";
  for (const std::string& id : graph.sorted_ids()) {
    const Node& n = graph.node(id);
    os << "  " << node_kind_name(n.kind) << " " << id << " " << quoted(n.statement);
    switch (n.kind) {
      case NodeKind::Goal:
        if (n.undeveloped) os << " undeveloped";
        if (!n.scope.empty()) {
          os << " scope: [";
          bool first = true;
          for (AttackClass c : n.scope) {
            if (!first) os << ", ";
            os << attack_class_token(c);
            first = false;
          }
          os << "]";
        }
        emit_id_list(os, "supports", graph.supported_parents(id));
        break;
      case NodeKind::Strategy:
        emit_id_list(os, "supports", graph.supported_parents(id));
        break;
      case NodeKind::Solution:
        if (!*n.evidence_valid) os << " invalid";
        emit_id_list(os, "supports", graph.supported_parents(id));
        break;
      case NodeKind::Context:
      case NodeKind::Assumption:
      case NodeKind::Justification: {
        std::vector<std::string> holders;
        for (const Edge& e : graph.edges())
          if (e.kind == EdgeKind::InContextOf && e.to == id) holders.push_back(e.from);
        std::sort(holders.begin(), holders.end(), IdLess{});
        emit_id_list(os, "of", holders);
        break;
      }
      case NodeKind::Defeater: {
        std::vector<std::string> targets;
        for (const Edge& e : graph.edges())
          if (e.kind == EdgeKind::ChallengedBy && e.to == id) targets.push_back(e.from);
        std::sort(targets.begin(), targets.end(), IdLess{});
        emit_id_list(os, "challenges", targets);
        if (*n.defeater_state != DefeaterState::Open)
          os << " state: " << defeater_state_token(*n.defeater_state);
        emit_id_list(os, "mitigated_by", graph.mitigation_goals(id));
        break;
      }
    }
    os << "\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace gsn
