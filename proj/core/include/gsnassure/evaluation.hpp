#pragma once
// Defeasible status propagation over an argument graph.
//
// Every node gets exactly one of four statuses, ordered by severity
// Supported < Undeveloped < Undercut < Defeated. Evaluation runs bottom-up
// over the combined dependency DAG with these rules:
//
//   1. A defeater is *active* iff its state is Open, or Mitigated while no
//      MitigatedBy goal is Supported. Retired defeaters are inactive.
//   2. An active defeater defeats a Goal or Solution target and undercuts a
//      Strategy/Context/Assumption/Justification target.
//   3. A solution with invalid evidence is Undercut.
//   4. A node whose attached context-like node is not Supported is Undercut.
//   5. Goals and strategies are Supported iff unstruck and every SupportedBy
//      child is Supported; a failed (Undercut/Defeated) child undercuts the
//      parent, an Undeveloped child leaves it Undeveloped.
//   6. Childless goals/strategies are Undeveloped; valid unchallenged
//      solutions and context-like nodes default to Supported.
//
// Defeater nodes themselves read as: Supported while the challenge is live,
// Defeated once a Supported mitigation answers it, Undeveloped when retired.
//
// The most severe applicable cause wins; every non-Supported node carries the
// full cause list that produced its status.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gsnassure/argument.hpp"
#include "gsnassure/changeset.hpp"

namespace gsn {

enum class Status { Supported, Undeveloped, Undercut, Defeated };

const char* status_token(Status status);
inline bool more_severe(Status a, Status b) { return static_cast<int>(a) > static_cast<int>(b); }

enum class CauseKind {
  ActiveDefeater,
  InvalidEvidence,
  UnsupportedChild,
  InvalidatedContext,
  NoSupport,
};

const char* cause_kind_token(CauseKind kind);

struct Cause {
  CauseKind kind;
  std::string source;

  friend bool operator==(const Cause&, const Cause&) = default;
};

struct NodeStatus {
  Status status = Status::Supported;
  std::vector<Cause> causes;  // ordered by (kind, source id)

  friend bool operator==(const NodeStatus&, const NodeStatus&) = default;
};

class StatusAssignment {
public:
  using Map = std::map<std::string, NodeStatus, IdLess>;

  StatusAssignment() = default;
  StatusAssignment(std::string case_name, std::uint64_t fingerprint, Map entries)
      : case_name_(std::move(case_name)), fingerprint_(fingerprint),
        entries_(std::move(entries)) {}

  const std::string& case_name() const { return case_name_; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  bool contains(const std::string& id) const { return entries_.count(id) != 0; }
  const NodeStatus& at(const std::string& id) const;  // throws UnknownNode
  Status status_of(const std::string& id) const { return at(id).status; }
  const Map& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const StatusAssignment& a, const StatusAssignment& b) {
    return a.case_name_ == b.case_name_ && a.fingerprint_ == b.fingerprint_ &&
           a.entries_ == b.entries_;
  }

private:
  std::string case_name_;
  std::uint64_t fingerprint_ = 0;
  Map entries_;
};

// Pure. Throws InvalidGraph when validate() reports errors.
StatusAssignment evaluate(const ArgumentGraph& graph);

// Applies `changes` to `graph` and updates `prior` incrementally; the result
// equals evaluate() on the updated graph. Throws StaleAssignment when `prior`
// was not produced from `graph` as passed, InvalidChange when an atom fails
// (the graph is left partially updated in that case, as with apply()).
StatusAssignment apply_and_reevaluate(ArgumentGraph& graph, const StatusAssignment& prior,
                                      const ChangeSet& changes);

// Cause tree for one node; children explain each cause's source node.
struct ExplanationCause;
struct Explanation {
  std::string id;
  Status status = Status::Supported;
  std::vector<ExplanationCause> causes;
};
struct ExplanationCause {
  Cause cause;
  std::vector<Explanation> sub;  // empty for self-referential causes
};

Explanation explain(const StatusAssignment& assignment, const std::string& node);

// Stable text forms consumed by the CLI: one line per node, numeric-aware
// id order, causes in parentheses.
std::string to_text(const StatusAssignment& assignment);
std::string to_text(const Explanation& explanation);

}  // namespace gsn
