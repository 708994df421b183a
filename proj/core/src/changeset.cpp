#include "gsnassure/changeset.hpp"

#include <algorithm>
#include <sstream>

namespace gsn {

ChangeSet diff(const ArgumentGraph& base, const ArgumentGraph& target) {
  ChangeSet out;

  // A node present on both sides but with a different kind is replaced
  // outright, which forces its surviving edges through remove/add as well.
  std::set<std::string> replaced;
  for (const auto& [id, bn] : base.nodes()) {
    const Node* tn = target.find(id);
    if (tn && tn->kind != bn.kind) replaced.insert(id);
  }

  auto edge_lost = [&](const Edge& e) {
    return !target.has_edge(e) || replaced.count(e.from) || replaced.count(e.to);
  };
  auto edge_gained = [&](const Edge& e) {
    return !base.has_edge(e) || replaced.count(e.from) || replaced.count(e.to);
  };

  for (const Edge& e : base.edges())
    if (edge_lost(e)) out.changes.push_back(RemoveEdge{e});
  for (const auto& [id, bn] : base.nodes())
    if (!target.contains(id) || replaced.count(id)) out.changes.push_back(RemoveNode{id});
  for (const auto& [id, tn] : target.nodes())
    if (!base.contains(id) || replaced.count(id)) out.changes.push_back(AddNode{tn});
  for (const Edge& e : target.edges())
    if (edge_gained(e)) out.changes.push_back(AddEdge{e});

  for (const auto& [id, tn] : target.nodes()) {
    const Node* bn = base.find(id);
    if (!bn || replaced.count(id)) continue;
    if (bn->statement != tn.statement) out.changes.push_back(SetStatement{id, tn.statement});
    if (bn->scope != tn.scope) out.changes.push_back(SetScope{id, tn.scope});
    if (bn->undeveloped != tn.undeveloped)
      out.changes.push_back(SetUndeveloped{id, tn.undeveloped});
    if (bn->defeater_state != tn.defeater_state && tn.defeater_state)
      out.changes.push_back(SetDefeaterState{id, *tn.defeater_state});
    if (bn->evidence_valid != tn.evidence_valid && tn.evidence_valid)
      out.changes.push_back(SetEvidenceValid{id, *tn.evidence_valid});
  }

  return out;
}

namespace {

void apply_one(ArgumentGraph& graph, const Change& change) {
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, AddNode>) graph.add_node(c.node);
        else if constexpr (std::is_same_v<T, RemoveNode>) graph.remove_node(c.id);
        else if constexpr (std::is_same_v<T, AddEdge>) graph.add_edge(c.edge);
        else if constexpr (std::is_same_v<T, RemoveEdge>) graph.remove_edge(c.edge);
        else if constexpr (std::is_same_v<T, SetDefeaterState>)
          graph.set_defeater_state(c.id, c.state);
        else if constexpr (std::is_same_v<T, SetEvidenceValid>)
          graph.set_evidence_valid(c.id, c.valid);
        else if constexpr (std::is_same_v<T, SetStatement>) graph.set_statement(c.id, c.statement);
        else if constexpr (std::is_same_v<T, SetScope>) graph.set_scope(c.id, c.scope);
        else if constexpr (std::is_same_v<T, SetUndeveloped>)
          graph.set_undeveloped(c.id, c.undeveloped);
      },
      change);
}

}  // namespace

void apply(ArgumentGraph& graph, const ChangeSet& changes) {
  std::size_t index = 0;
  for (const Change& change : changes.changes) {
    try {
      apply_one(graph, change);
    } catch (const GsnError& err) {
      throw GsnError(ErrorCode::InvalidChange, "change #" + std::to_string(index + 1) +
                                                   " failed: " + err.what());
    }
    ++index;
  }
}

std::vector<std::string> touched_ids(const Change& change) {
  return std::visit(
      [](const auto& c) -> std::vector<std::string> {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, AddNode>) return {c.node.id};
        else if constexpr (std::is_same_v<T, AddEdge> || std::is_same_v<T, RemoveEdge>)
          return {c.edge.from, c.edge.to};
        else return {c.id};
      },
      change);
}

namespace {

std::string scope_text(const std::set<AttackClass>& scope) {
  std::string out = "[";
  bool first = true;
  for (AttackClass c : scope) {
    if (!first) out += ", ";
    out += attack_class_token(c);
    first = false;
  }
  return out + "]";
}

}  // namespace

std::string to_text(const ChangeSet& changes) {
  std::ostringstream os;
  for (const Change& change : changes.changes) {
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, AddNode>) {
            os << "add " << node_kind_name(c.node.kind) << " " << c.node.id << " \""
               << c.node.statement << "\"";
          } else if constexpr (std::is_same_v<T, RemoveNode>) {
            os << "remove node " << c.id;
          } else if constexpr (std::is_same_v<T, AddEdge>) {
            os << "add edge " << c.edge.from << " " << edge_kind_name(c.edge.kind) << " "
               << c.edge.to;
          } else if constexpr (std::is_same_v<T, RemoveEdge>) {
            os << "remove edge " << c.edge.from << " " << edge_kind_name(c.edge.kind) << " "
               << c.edge.to;
          } else if constexpr (std::is_same_v<T, SetDefeaterState>) {
            os << "set " << c.id << " state " << defeater_state_token(c.state);
          } else if constexpr (std::is_same_v<T, SetEvidenceValid>) {
            os << "set " << c.id << " evidence " << (c.valid ? "valid" : "invalid");
          } else if constexpr (std::is_same_v<T, SetStatement>) {
            os << "set " << c.id << " statement \"" << c.statement << "\"";
          } else if constexpr (std::is_same_v<T, SetScope>) {
            os << "set " << c.id << " scope " << scope_text(c.scope);
          } else if constexpr (std::is_same_v<T, SetUndeveloped>) {
            os << "set " << c.id << (c.undeveloped ? " undeveloped" : " developed");
          }
        },
        change);
    os << "\n";
  }
  return os.str();
}

}  // namespace gsn
