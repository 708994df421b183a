#include "gsnassure/argument.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>

namespace gsn {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::MalformedNode: return "MalformedNode";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::UnknownEndpoint: return "UnknownEndpoint";
    case ErrorCode::UnknownEdge: return "UnknownEdge";
    case ErrorCode::IncompatibleKinds: return "IncompatibleKinds";
    case ErrorCode::WouldCreateCycle: return "WouldCreateCycle";
    case ErrorCode::NodeHasEdges: return "NodeHasEdges";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::StaleAssignment: return "StaleAssignment";
    case ErrorCode::InvalidChange: return "InvalidChange";
    case ErrorCode::EmptyCoverageWhileActive: return "EmptyCoverageWhileActive";
    case ErrorCode::NotASolution: return "NotASolution";
    case ErrorCode::UnknownGuardrail: return "UnknownGuardrail";
    case ErrorCode::MalformedEvent: return "MalformedEvent";
    case ErrorCode::UnknownIncident: return "UnknownIncident";
    case ErrorCode::NotSerious: return "NotSerious";
    case ErrorCode::MismatchedAssignment: return "MismatchedAssignment";
    case ErrorCode::MismatchedInputs: return "MismatchedInputs";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

const char* node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Goal: return "goal";
    case NodeKind::Strategy: return "strategy";
    case NodeKind::Solution: return "solution";
    case NodeKind::Context: return "context";
    case NodeKind::Assumption: return "assumption";
    case NodeKind::Justification: return "justification";
    case NodeKind::Defeater: return "defeater";
  }
  return "?";
}

namespace {

constexpr std::array<const char*, kAttackClassCount> kAttackTokens = {
    "jailbreak",      "heuristic_optimization", "randomization",
    "gradient_based", "model_inversion",        "context_switching",
};

constexpr std::array<const char*, 3> kStateTokens = {"open", "mitigated", "retired"};

}  // namespace

const char* attack_class_token(AttackClass cls) {
  return kAttackTokens[static_cast<int>(cls)];
}

const char* defeater_state_token(DefeaterState state) {
  return kStateTokens[static_cast<int>(state)];
}

const char* edge_kind_name(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::SupportedBy: return "supported_by";
    case EdgeKind::InContextOf: return "in_context_of";
    case EdgeKind::ChallengedBy: return "challenged_by";
    case EdgeKind::MitigatedBy: return "mitigated_by";
  }
  return "?";
}

std::optional<AttackClass> attack_class_from_token(std::string_view token) {
  for (int i = 0; i < kAttackClassCount; ++i) {
    if (token == kAttackTokens[i]) return static_cast<AttackClass>(i);
  }
  return std::nullopt;
}

std::optional<DefeaterState> defeater_state_from_token(std::string_view token) {
  for (int i = 0; i < 3; ++i) {
    if (token == kStateTokens[i]) return static_cast<DefeaterState>(i);
  }
  return std::nullopt;
}

bool id_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    char ca = a[i], cb = b[j];
    bool da = std::isdigit(static_cast<unsigned char>(ca));
    bool db = std::isdigit(static_cast<unsigned char>(cb));
    if (da && db) {
      std::size_t ia = i, jb = j;
      while (ia < a.size() && std::isdigit(static_cast<unsigned char>(a[ia]))) ++ia;
      while (jb < b.size() && std::isdigit(static_cast<unsigned char>(b[jb]))) ++jb;
      std::string_view na = a.substr(i, ia - i), nb = b.substr(j, jb - j);
      std::string_view ta = na.substr(std::min(na.find_first_not_of('0'), na.size() - 1));
      std::string_view tb = nb.substr(std::min(nb.find_first_not_of('0'), nb.size() - 1));
      if (ta.size() != tb.size()) return ta.size() < tb.size();
      if (ta != tb) return ta < tb;
      // Same value: fewer leading zeros first, then plain compare.
      if (na != nb) return na < nb;
      i = ia;
      j = jb;
      continue;
    }
    if (ca != cb) return ca < cb;
    ++i;
    ++j;
  }
  return a.size() - i < b.size() - j;
}

bool valid_id(std::string_view id) {
  if (id.empty()) return false;
  auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  if (!alnum(id.front())) return false;
  return std::all_of(id.begin(), id.end(), [&](char c) {
    return alnum(c) || c == '.' || c == '-' || c == '_';
  });
}

void ArgumentGraph::check_node_shape(const Node& node) const {
  if (!valid_id(node.id))
    throw GsnError(ErrorCode::MalformedNode, "invalid id '" + node.id + "'");
  if (node.defeater_state.has_value() != (node.kind == NodeKind::Defeater))
    throw GsnError(ErrorCode::MalformedNode,
                   "defeater_state must be present exactly on defeater nodes ('" + node.id + "')");
  if (node.evidence_valid.has_value() != (node.kind == NodeKind::Solution))
    throw GsnError(ErrorCode::MalformedNode,
                   "evidence_valid must be present exactly on solution nodes ('" + node.id + "')");
  if (node.kind != NodeKind::Goal && !node.scope.empty())
    throw GsnError(ErrorCode::MalformedNode,
                   "scope is meaningful on goal nodes only ('" + node.id + "')");
  if (node.kind != NodeKind::Goal && node.undeveloped)
    throw GsnError(ErrorCode::MalformedNode,
                   "undeveloped marker applies to goal nodes only ('" + node.id + "')");
}

const std::string& ArgumentGraph::add_node(const Node& node) {
  check_node_shape(node);
  auto [it, inserted] = nodes_.emplace(node.id, node);
  if (!inserted) throw GsnError(ErrorCode::DuplicateId, "node '" + node.id + "' already exists");
  return it->first;
}

namespace {

bool edge_kinds_compatible(EdgeKind kind, NodeKind from, NodeKind to) {
  switch (kind) {
    case EdgeKind::SupportedBy:
      return (from == NodeKind::Goal && to == NodeKind::Strategy) ||
             (from == NodeKind::Goal && to == NodeKind::Solution) ||
             (from == NodeKind::Strategy && to == NodeKind::Goal);
    case EdgeKind::InContextOf:
      return (from == NodeKind::Goal || from == NodeKind::Strategy) &&
             (to == NodeKind::Context || to == NodeKind::Assumption ||
              to == NodeKind::Justification);
    case EdgeKind::ChallengedBy:
      return from != NodeKind::Defeater && to == NodeKind::Defeater;
    case EdgeKind::MitigatedBy:
      return from == NodeKind::Defeater && to == NodeKind::Goal;
  }
  return false;
}

}  // namespace

bool ArgumentGraph::would_create_cycle(const Edge& edge) const {
  // "X depends on Y" edges: parent->child (SupportedBy), holder->context,
  // target->defeater, defeater->mitigation goal. All four stored directions
  // already point from the depending node to the dependency, so the stored
  // edge set itself is the dependency relation.
  if (edge.from == edge.to) return true;
  // DFS from edge.to: if edge.from is reachable, adding from->to closes a loop.
  std::vector<const std::string*> stack{&edge.to};
  std::set<std::string_view> seen;
  while (!stack.empty()) {
    const std::string& cur = *stack.back();
    stack.pop_back();
    if (cur == edge.from) return true;
    if (!seen.insert(cur).second) continue;
    auto it = edges_.lower_bound(Edge{cur, EdgeKind::SupportedBy, ""});
    for (; it != edges_.end() && it->from == cur; ++it) stack.push_back(&it->to);
  }
  return false;
}

void ArgumentGraph::add_edge(const Edge& edge) {
  auto from_it = nodes_.find(edge.from);
  auto to_it = nodes_.find(edge.to);
  if (from_it == nodes_.end())
    throw GsnError(ErrorCode::UnknownEndpoint, "edge source '" + edge.from + "' not in graph");
  if (to_it == nodes_.end())
    throw GsnError(ErrorCode::UnknownEndpoint, "edge target '" + edge.to + "' not in graph");
  if (!edge_kinds_compatible(edge.kind, from_it->second.kind, to_it->second.kind))
    throw GsnError(ErrorCode::IncompatibleKinds,
                   std::string(edge_kind_name(edge.kind)) + " cannot connect " +
                       node_kind_name(from_it->second.kind) + " '" + edge.from + "' to " +
                       node_kind_name(to_it->second.kind) + " '" + edge.to + "'");
  if (edges_.count(edge))
    throw GsnError(ErrorCode::DuplicateEdge, "edge already present: " + edge.from + " " +
                                                 edge_kind_name(edge.kind) + " " + edge.to);
  if (would_create_cycle(edge))
    throw GsnError(ErrorCode::WouldCreateCycle, "edge " + edge.from + " -> " + edge.to +
                                                    " closes a dependency cycle");
  edges_.insert(edge);
}

void ArgumentGraph::remove_node(const std::string& id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw GsnError(ErrorCode::UnknownNode, "no node '" + id + "'");
  for (const Edge& e : edges_) {
    if (e.from == id || e.to == id)
      throw GsnError(ErrorCode::NodeHasEdges,
                     "node '" + id + "' still has incident edges; remove them first");
  }
  nodes_.erase(it);
}

void ArgumentGraph::remove_edge(const Edge& edge) {
  if (edges_.erase(edge) == 0)
    throw GsnError(ErrorCode::UnknownEdge, "edge not present: " + edge.from + " " +
                                               edge_kind_name(edge.kind) + " " + edge.to);
}

namespace {

Node& mutable_node(std::map<std::string, Node>& nodes, const std::string& id) {
  auto it = nodes.find(id);
  if (it == nodes.end()) throw GsnError(ErrorCode::UnknownNode, "no node '" + id + "'");
  return it->second;
}

}  // namespace

void ArgumentGraph::set_statement(const std::string& id, std::string statement) {
  mutable_node(nodes_, id).statement = std::move(statement);
}

void ArgumentGraph::set_scope(const std::string& id, std::set<AttackClass> scope) {
  Node& n = mutable_node(nodes_, id);
  if (n.kind != NodeKind::Goal && !scope.empty())
    throw GsnError(ErrorCode::MalformedNode, "scope is meaningful on goal nodes only ('" + id + "')");
  n.scope = std::move(scope);
}

void ArgumentGraph::set_undeveloped(const std::string& id, bool undeveloped) {
  Node& n = mutable_node(nodes_, id);
  if (n.kind != NodeKind::Goal && undeveloped)
    throw GsnError(ErrorCode::MalformedNode,
                   "undeveloped marker applies to goal nodes only ('" + id + "')");
  n.undeveloped = undeveloped;
}

void ArgumentGraph::set_defeater_state(const std::string& id, DefeaterState state) {
  Node& n = mutable_node(nodes_, id);
  if (n.kind != NodeKind::Defeater)
    throw GsnError(ErrorCode::MalformedNode, "'" + id + "' is not a defeater");
  n.defeater_state = state;
}

void ArgumentGraph::set_evidence_valid(const std::string& id, bool valid) {
  Node& n = mutable_node(nodes_, id);
  if (n.kind != NodeKind::Solution)
    throw GsnError(ErrorCode::MalformedNode, "'" + id + "' is not a solution");
  n.evidence_valid = valid;
}

const Node* ArgumentGraph::find(const std::string& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const Node& ArgumentGraph::node(const std::string& id) const {
  const Node* n = find(id);
  if (!n) throw GsnError(ErrorCode::UnknownNode, "no node '" + id + "'");
  return *n;
}

std::vector<std::string> ArgumentGraph::sorted_ids() const {
  std::vector<std::string> ids;
  ids.reserve(nodes_.size());
  for (const auto& [id, _] : nodes_) ids.push_back(id);
  std::sort(ids.begin(), ids.end(), IdLess{});
  return ids;
}

namespace {

std::vector<std::string> scan_from(const std::set<Edge>& edges, const std::string& id,
                                   EdgeKind kind) {
  std::vector<std::string> out;
  for (auto it = edges.lower_bound(Edge{id, EdgeKind::SupportedBy, ""});
       it != edges.end() && it->from == id; ++it) {
    if (it->kind == kind) out.push_back(it->to);
  }
  std::sort(out.begin(), out.end(), IdLess{});
  return out;
}

std::vector<std::string> scan_to(const std::set<Edge>& edges, const std::string& id,
                                 EdgeKind kind) {
  std::vector<std::string> out;
  for (const Edge& e : edges) {
    if (e.kind == kind && e.to == id) out.push_back(e.from);
  }
  std::sort(out.begin(), out.end(), IdLess{});
  return out;
}

}  // namespace

std::vector<std::string> ArgumentGraph::supported_children(const std::string& id) const {
  return scan_from(edges_, id, EdgeKind::SupportedBy);
}

std::vector<std::string> ArgumentGraph::supported_parents(const std::string& id) const {
  return scan_to(edges_, id, EdgeKind::SupportedBy);
}

std::vector<std::string> ArgumentGraph::context_attachments(const std::string& id) const {
  return scan_from(edges_, id, EdgeKind::InContextOf);
}

std::vector<std::string> ArgumentGraph::challengers(const std::string& id) const {
  return scan_from(edges_, id, EdgeKind::ChallengedBy);
}

std::vector<std::string> ArgumentGraph::mitigation_goals(const std::string& defeater) const {
  return scan_from(edges_, defeater, EdgeKind::MitigatedBy);
}

std::vector<Diagnostic> ArgumentGraph::validate() const {
  std::vector<Diagnostic> out;
  auto error = [&](std::string msg, std::string node, std::optional<Edge> edge = std::nullopt) {
    out.push_back({Severity::Error, std::move(msg), std::move(node), std::move(edge)});
  };

  for (const auto& [id, n] : nodes_) {
    if (!valid_id(id)) error("invalid node id", id);
    if (n.defeater_state.has_value() != (n.kind == NodeKind::Defeater))
      error("defeater_state present iff node is a defeater", id);
    if (n.evidence_valid.has_value() != (n.kind == NodeKind::Solution))
      error("evidence_valid present iff node is a solution", id);
    if (n.kind != NodeKind::Goal && (!n.scope.empty() || n.undeveloped))
      error("scope/undeveloped are goal-only fields", id);
  }

  bool structure_ok = true;
  for (const Edge& e : edges_) {
    auto from = nodes_.find(e.from);
    auto to = nodes_.find(e.to);
    if (from == nodes_.end() || to == nodes_.end()) {
      error("dangling edge", "", e);
      structure_ok = false;
      continue;
    }
    if (!edge_kinds_compatible(e.kind, from->second.kind, to->second.kind)) {
      if (e.kind == EdgeKind::SupportedBy && from->second.kind == NodeKind::Solution)
        error("solution node has outgoing supported_by edge", "", e);
      else
        error("edge kind incompatible with endpoint kinds", "", e);
      structure_ok = false;
    }
  }

  // Cycle check over the combined dependency relation (only meaningful once
  // the edge set refers to real nodes).
  if (structure_ok) {
    std::map<std::string, int> indegree;
    for (const auto& [id, _] : nodes_) indegree[id] = 0;
    for (const Edge& e : edges_) indegree[e.to]++;
    std::vector<std::string> ready;
    for (const auto& [id, deg] : indegree)
      if (deg == 0) ready.push_back(id);
    std::size_t visited = 0;
    while (!ready.empty()) {
      std::string cur = std::move(ready.back());
      ready.pop_back();
      ++visited;
      for (auto it = edges_.lower_bound(Edge{cur, EdgeKind::SupportedBy, ""});
           it != edges_.end() && it->from == cur; ++it) {
        if (--indegree[it->to] == 0) ready.push_back(it->to);
      }
    }
    if (visited != nodes_.size()) error("dependency cycle among argument nodes", "");
  }

  for (const auto& [id, n] : nodes_) {
    if (n.kind == NodeKind::Goal && !n.undeveloped && supported_children(id).empty())
      out.push_back({Severity::Warning, "goal has no support and no undeveloped marker", id, {}});
    if (n.kind == NodeKind::Defeater && scan_to(edges_, id, EdgeKind::ChallengedBy).empty())
      out.push_back({Severity::Warning, "defeater challenges nothing", id, {}});
  }

  return out;
}

std::uint64_t ArgumentGraph::fingerprint() const {
  // FNV-1a over a canonical byte stream; maps/sets give sorted iteration.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  };
  mix(name_);
  for (const auto& [id, n] : nodes_) {
    mix(id);
    mix(node_kind_name(n.kind));
    mix(n.statement);
    for (AttackClass c : n.scope) mix(attack_class_token(c));
    mix(n.undeveloped ? "u1" : "u0");
    if (n.defeater_state) mix(defeater_state_token(*n.defeater_state));
    if (n.evidence_valid) mix(*n.evidence_valid ? "v1" : "v0");
  }
  for (const Edge& e : edges_) {
    mix(e.from);
    mix(edge_kind_name(e.kind));
    mix(e.to);
  }
  return h;
}

void ArgumentGraph::insert_node_unchecked(Node node) {
  auto [it, inserted] = nodes_.emplace(node.id, std::move(node));
  if (!inserted) throw GsnError(ErrorCode::DuplicateId, "node '" + it->first + "' already exists");
}

void ArgumentGraph::insert_edge_unchecked(const Edge& edge) {
  if (!edges_.insert(edge).second)
    throw GsnError(ErrorCode::DuplicateEdge, "edge already present: " + edge.from + " " +
                                                 edge_kind_name(edge.kind) + " " + edge.to);
}

}  // namespace gsn
