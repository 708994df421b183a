#include "gsnassure/evaluation.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace gsn {

const char* status_token(Status status) {
  switch (status) {
    case Status::Supported: return "supported";
    case Status::Undeveloped: return "undeveloped";
    case Status::Undercut: return "undercut";
    case Status::Defeated: return "defeated";
  }
  return "?";
}

const char* cause_kind_token(CauseKind kind) {
  switch (kind) {
    case CauseKind::ActiveDefeater: return "active_defeater";
    case CauseKind::InvalidEvidence: return "invalid_evidence";
    case CauseKind::UnsupportedChild: return "unsupported_child";
    case CauseKind::InvalidatedContext: return "invalidated_context";
    case CauseKind::NoSupport: return "no_support";
  }
  return "?";
}

const NodeStatus& StatusAssignment::at(const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw GsnError(ErrorCode::UnknownNode, "no status for '" + id + "'");
  return it->second;
}

namespace {

// Adjacency snapshot so the evaluator does one pass over the edge set.
struct Indexes {
  std::map<std::string, std::vector<std::string>> children;     // SupportedBy out
  std::map<std::string, std::vector<std::string>> contexts;     // InContextOf out
  std::map<std::string, std::vector<std::string>> challengers;  // ChallengedBy out
  std::map<std::string, std::vector<std::string>> mitigations;  // MitigatedBy out
  std::map<std::string, std::vector<std::string>> dependents;   // reverse dependency

  explicit Indexes(const ArgumentGraph& graph) {
    for (const Edge& e : graph.edges()) {
      switch (e.kind) {
        case EdgeKind::SupportedBy: children[e.from].push_back(e.to); break;
        case EdgeKind::InContextOf: contexts[e.from].push_back(e.to); break;
        case EdgeKind::ChallengedBy: challengers[e.from].push_back(e.to); break;
        case EdgeKind::MitigatedBy: mitigations[e.from].push_back(e.to); break;
      }
      dependents[e.to].push_back(e.from);
    }
    for (auto* m : {&children, &contexts, &challengers, &mitigations, &dependents})
      for (auto& [_, v] : *m) std::sort(v.begin(), v.end(), IdLess{});
  }

  const std::vector<std::string>& of(const std::map<std::string, std::vector<std::string>>& m,
                                     const std::string& id) const {
    static const std::vector<std::string> empty;
    auto it = m.find(id);
    return it == m.end() ? empty : it->second;
  }
};

Status cause_severity(CauseKind kind, NodeKind node_kind, Status child_status) {
  switch (kind) {
    case CauseKind::ActiveDefeater:
      return (node_kind == NodeKind::Goal || node_kind == NodeKind::Solution) ? Status::Defeated
                                                                              : Status::Undercut;
    case CauseKind::InvalidEvidence:
    case CauseKind::InvalidatedContext:
      return Status::Undercut;
    case CauseKind::UnsupportedChild:
      return child_status == Status::Undeveloped ? Status::Undeveloped : Status::Undercut;
    case CauseKind::NoSupport:
      return Status::Undeveloped;
  }
  return Status::Supported;
}

// A mitigated defeater stays live until some mitigation goal is Supported.
bool defeater_active(const Node& node, const Indexes& idx,
                     const StatusAssignment::Map& statuses) {
  switch (*node.defeater_state) {
    case DefeaterState::Open: return true;
    case DefeaterState::Retired: return false;
    case DefeaterState::Mitigated:
      for (const std::string& goal : idx.of(idx.mitigations, node.id)) {
        auto it = statuses.find(goal);
        if (it != statuses.end() && it->second.status == Status::Supported) return false;
      }
      return true;
  }
  return true;
}

NodeStatus evaluate_node(const Node& node, const Indexes& idx,
                         const StatusAssignment::Map& statuses) {
  NodeStatus result;

  if (node.kind == NodeKind::Defeater) {
    if (*node.defeater_state == DefeaterState::Retired) {
      result.status = Status::Undeveloped;
      result.causes.push_back({CauseKind::NoSupport, node.id});
    } else if (defeater_active(node, idx, statuses)) {
      result.status = Status::Supported;  // the challenge is live
    } else {
      result.status = Status::Defeated;
      for (const std::string& goal : idx.of(idx.mitigations, node.id)) {
        auto it = statuses.find(goal);
        if (it != statuses.end() && it->second.status == Status::Supported)
          result.causes.push_back({CauseKind::ActiveDefeater, goal});
      }
    }
    return result;
  }

  std::vector<std::pair<Cause, Status>> hits;

  for (const std::string& defeater : idx.of(idx.challengers, node.id)) {
    auto it = statuses.find(defeater);
    // Defeater status Supported == active, by construction above.
    if (it != statuses.end() && it->second.status == Status::Supported)
      hits.push_back({{CauseKind::ActiveDefeater, defeater},
                      cause_severity(CauseKind::ActiveDefeater, node.kind, {})});
  }

  if (node.kind == NodeKind::Solution && !*node.evidence_valid)
    hits.push_back({{CauseKind::InvalidEvidence, node.id},
                    cause_severity(CauseKind::InvalidEvidence, node.kind, {})});

  for (const std::string& ctx : idx.of(idx.contexts, node.id)) {
    auto it = statuses.find(ctx);
    if (it != statuses.end() && it->second.status != Status::Supported)
      hits.push_back({{CauseKind::InvalidatedContext, ctx},
                      cause_severity(CauseKind::InvalidatedContext, node.kind, {})});
  }

  if (node.kind == NodeKind::Goal || node.kind == NodeKind::Strategy) {
    const auto& children = idx.of(idx.children, node.id);
    if (children.empty()) {
      hits.push_back({{CauseKind::NoSupport, node.id},
                      cause_severity(CauseKind::NoSupport, node.kind, {})});
    } else {
      for (const std::string& child : children) {
        auto it = statuses.find(child);
        if (it == statuses.end() || it->second.status == Status::Supported) continue;
        hits.push_back({{CauseKind::UnsupportedChild, child},
                        cause_severity(CauseKind::UnsupportedChild, node.kind,
                                       it->second.status)});
      }
    }
  }

  for (const auto& [cause, severity] : hits) {
    if (more_severe(severity, result.status)) result.status = severity;
    result.causes.push_back(cause);
  }
  std::sort(result.causes.begin(), result.causes.end(), [](const Cause& a, const Cause& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    return id_less(a.source, b.source);
  });
  return result;
}

void check_valid(const ArgumentGraph& graph) {
  for (const Diagnostic& d : graph.validate()) {
    if (d.severity == Severity::Error)
      throw GsnError(ErrorCode::InvalidGraph,
                     d.message + (d.node.empty() ? "" : " ('" + d.node + "')"));
  }
}

// Kahn order over "status of X depends on Y" with Y processed first; the
// stored edge directions already point from depender to dependency.
std::vector<const Node*> dependency_order(const ArgumentGraph& graph) {
  std::map<std::string, int> pending;  // unevaluated dependencies per node
  for (const auto& [id, _] : graph.nodes()) pending[id] = 0;
  for (const Edge& e : graph.edges()) pending[e.from]++;

  std::vector<const std::string*> ready;
  for (auto& [id, count] : pending)
    if (count == 0) ready.push_back(&id);

  std::vector<const Node*> order;
  order.reserve(graph.node_count());
  std::map<std::string, std::vector<const std::string*>> dependents;
  for (const Edge& e : graph.edges()) dependents[e.to].push_back(&e.from);

  while (!ready.empty()) {
    const std::string& id = *ready.back();
    ready.pop_back();
    order.push_back(&graph.node(id));
    auto it = dependents.find(id);
    if (it == dependents.end()) continue;
    for (const std::string* dep : it->second)
      if (--pending[*dep] == 0) ready.push_back(dep);
  }
  if (order.size() != graph.node_count())
    throw GsnError(ErrorCode::InvalidGraph, "dependency cycle among argument nodes");
  return order;
}

}  // namespace

StatusAssignment evaluate(const ArgumentGraph& graph) {
  check_valid(graph);
  Indexes idx(graph);
  StatusAssignment::Map statuses;
  for (const Node* node : dependency_order(graph))
    statuses.emplace(node->id, evaluate_node(*node, idx, statuses));
  return StatusAssignment(graph.name(), graph.fingerprint(), std::move(statuses));
}

StatusAssignment apply_and_reevaluate(ArgumentGraph& graph, const StatusAssignment& prior,
                                      const ChangeSet& changes) {
  if (prior.fingerprint() != graph.fingerprint())
    throw GsnError(ErrorCode::StaleAssignment,
                   "assignment was not produced from this graph state");

  // Seed with everything a change touches; edge endpoints survive node
  // removal as seeds, so dependents of removed structure are covered.
  std::set<std::string> seeds;
  for (const Change& change : changes.changes)
    for (std::string& id : touched_ids(change)) seeds.insert(std::move(id));
  apply(graph, changes);

  check_valid(graph);
  Indexes idx(graph);

  // Dirty region: seeds plus everything that transitively depends on them.
  std::set<std::string> dirty;
  std::vector<std::string> queue;
  for (const std::string& s : seeds)
    if (graph.contains(s)) { dirty.insert(s); queue.push_back(s); }
  while (!queue.empty()) {
    std::string cur = std::move(queue.back());
    queue.pop_back();
    for (const std::string& dep : idx.of(idx.dependents, cur))
      if (dirty.insert(dep).second) queue.push_back(dep);
  }

  StatusAssignment::Map statuses;
  for (const auto& [id, st] : prior.entries())
    if (graph.contains(id) && !dirty.count(id)) statuses.emplace(id, st);

  // Evaluate the dirty region in dependency order; clean statuses are final.
  for (const Node* node : dependency_order(graph)) {
    if (!dirty.count(node->id)) continue;
    statuses.insert_or_assign(node->id, evaluate_node(*node, idx, statuses));
  }

  return StatusAssignment(graph.name(), graph.fingerprint(), std::move(statuses));
}

Explanation explain(const StatusAssignment& assignment, const std::string& node) {
  const NodeStatus& st = assignment.at(node);
  Explanation out{node, st.status, {}};
  for (const Cause& cause : st.causes) {
    ExplanationCause branch{cause, {}};
    if (cause.source != node && assignment.contains(cause.source))
      branch.sub.push_back(explain(assignment, cause.source));
    out.causes.push_back(std::move(branch));
  }
  return out;
}

std::string to_text(const StatusAssignment& assignment) {
  std::ostringstream os;
  os << "case: " << assignment.case_name() << "\n";
  for (const auto& [id, st] : assignment.entries()) {
    os << id << ": " << status_token(st.status);
    if (!st.causes.empty()) {
      os << " (";
      for (std::size_t i = 0; i < st.causes.size(); ++i) {
        if (i) os << "; ";
        os << cause_kind_token(st.causes[i].kind) << ": " << st.causes[i].source;
      }
      os << ")";
    }
    os << "\n";
  }
  return os.str();
}

namespace {

void explain_lines(const Explanation& e, int depth, std::ostringstream& os) {
  os << std::string(static_cast<std::size_t>(depth) * 2, ' ') << e.id << ": "
     << status_token(e.status) << "\n";
  for (const ExplanationCause& c : e.causes) {
    os << std::string(static_cast<std::size_t>(depth) * 2 + 2, ' ') << "- "
       << cause_kind_token(c.cause.kind) << ": " << c.cause.source << "\n";
    for (const Explanation& sub : c.sub) explain_lines(sub, depth + 2, os);
  }
}

}  // namespace

std::string to_text(const Explanation& explanation) {
  std::ostringstream os;
  explain_lines(explanation, 0, os);
  return os.str();
}

}  // namespace gsn
