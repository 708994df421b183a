#pragma once
// Typed GSN argument graph: seven node kinds, four edge kinds, structural
// validation. All mutators keep the graph well-typed and keep the combined
// dependency relation (SupportedBy / InContextOf / ChallengedBy / MitigatedBy,
// oriented as "status depends on") acyclic. Graphs assembled through the
// unchecked loader seam must be confirmed with validate().

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gsnassure/error.hpp"

namespace gsn {

enum class NodeKind {
  Goal,
  Strategy,
  Solution,
  Context,
  Assumption,
  Justification,
  Defeater,
};

enum class AttackClass {
  Jailbreak,
  HeuristicOptimization,
  Randomization,
  GradientBased,
  ModelInversion,
  ContextSwitching,
};

inline constexpr int kAttackClassCount = 6;

enum class DefeaterState { Open, Mitigated, Retired };

enum class EdgeKind { SupportedBy, InContextOf, ChallengedBy, MitigatedBy };

// Stable serialized tokens (lowercase snake for attack classes, per contract).
const char* node_kind_name(NodeKind kind);
const char* attack_class_token(AttackClass cls);
const char* defeater_state_token(DefeaterState state);
const char* edge_kind_name(EdgeKind kind);
std::optional<AttackClass> attack_class_from_token(std::string_view token);
std::optional<DefeaterState> defeater_state_from_token(std::string_view token);

// Natural ordering for dotted ids: "G1.9" < "G1.10", digit runs compare by
// value. Used for every deterministic listing in the library.
bool id_less(std::string_view a, std::string_view b);

struct IdLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const { return id_less(a, b); }
};

// Ids are one alnum character followed by alnum, '.', '-' or '_'.
bool valid_id(std::string_view id);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Goal;
  std::string statement;
  std::set<AttackClass> scope;                   // Goal only
  bool undeveloped = false;                      // Goal only
  std::optional<DefeaterState> defeater_state;   // Defeater only
  std::optional<bool> evidence_valid;            // Solution only

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  std::string from;
  EdgeKind kind = EdgeKind::SupportedBy;
  std::string to;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  std::string node;           // locus node id, empty when the locus is an edge
  std::optional<Edge> edge;
};

class ArgumentGraph {
public:
  ArgumentGraph() = default;
  explicit ArgumentGraph(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  // Throws DuplicateId or MalformedNode. Returns the stored id.
  const std::string& add_node(const Node& node);

  // Throws UnknownEndpoint, IncompatibleKinds, DuplicateEdge or
  // WouldCreateCycle (combined dependency relation must stay acyclic).
  void add_edge(const Edge& edge);

  // Incident edges must be removed first (NodeHasEdges otherwise).
  void remove_node(const std::string& id);
  void remove_edge(const Edge& edge);

  // Field setters; each enforces the kind it is meaningful for.
  void set_statement(const std::string& id, std::string statement);
  void set_scope(const std::string& id, std::set<AttackClass> scope);
  void set_undeveloped(const std::string& id, bool undeveloped);
  void set_defeater_state(const std::string& id, DefeaterState state);
  void set_evidence_valid(const std::string& id, bool valid);

  bool contains(const std::string& id) const { return nodes_.count(id) != 0; }
  const Node* find(const std::string& id) const;
  const Node& node(const std::string& id) const;  // throws UnknownNode
  bool has_edge(const Edge& edge) const { return edges_.count(edge) != 0; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::map<std::string, Node>& nodes() const { return nodes_; }
  const std::set<Edge>& edges() const { return edges_; }
  std::vector<std::string> sorted_ids() const;  // numeric-aware order

  // Edge scans (linear; graphs are small).
  std::vector<std::string> supported_children(const std::string& id) const;
  std::vector<std::string> supported_parents(const std::string& id) const;
  std::vector<std::string> context_attachments(const std::string& id) const;
  std::vector<std::string> challengers(const std::string& id) const;
  std::vector<std::string> mitigation_goals(const std::string& defeater) const;

  // True if adding `edge` would close a cycle in the combined dependency
  // relation. Endpoints must exist.
  bool would_create_cycle(const Edge& edge) const;

  // Structural well-formedness. Errors: dangling edge, edge-typing violation
  // (including Solution with outgoing SupportedBy), dependency cycle,
  // kind/field mismatch. Warnings: goal with no support and no undeveloped
  // marker, defeater never attached via ChallengedBy.
  std::vector<Diagnostic> validate() const;

  // Order-independent structural hash over (name, nodes, edges).
  std::uint64_t fingerprint() const;

  // Loader seam: inserts without typing or cycle checks. Duplicate ids still
  // rejected. Pair with validate().
  void insert_node_unchecked(Node node);
  void insert_edge_unchecked(const Edge& edge);

  friend bool operator==(const ArgumentGraph& a, const ArgumentGraph& b) {
    return a.name_ == b.name_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

private:
  void check_node_shape(const Node& node) const;

  std::string name_;
  std::map<std::string, Node> nodes_;
  std::set<Edge> edges_;
};

}  // namespace gsn
