#pragma once
// Atomic graph deltas. diff(base, target) produces a ChangeSet that apply()
// replays onto base to reach target exactly; both directions go through the
// checked ArgumentGraph mutators, so a ChangeSet can never smuggle in an
// ill-typed or cyclic structure.

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "gsnassure/argument.hpp"

namespace gsn {

struct AddNode { Node node; };
struct RemoveNode { std::string id; };
struct AddEdge { Edge edge; };
struct RemoveEdge { Edge edge; };
struct SetDefeaterState { std::string id; DefeaterState state; };
struct SetEvidenceValid { std::string id; bool valid; };
struct SetStatement { std::string id; std::string statement; };
struct SetScope { std::string id; std::set<AttackClass> scope; };
struct SetUndeveloped { std::string id; bool undeveloped; };

using Change = std::variant<AddNode, RemoveNode, AddEdge, RemoveEdge, SetDefeaterState,
                            SetEvidenceValid, SetStatement, SetScope, SetUndeveloped>;

struct ChangeSet {
  std::vector<Change> changes;

  bool empty() const { return changes.empty(); }
  std::size_t size() const { return changes.size(); }
  void append(const ChangeSet& other) {
    changes.insert(changes.end(), other.changes.begin(), other.changes.end());
  }
};

// Ordered so that apply(base, diff(base, target)) == target: edge removals,
// node removals, node additions, edge additions, field updates. Changes
// describe structure only; the case name carries identity and has no atom,
// so the round-trip guarantee applies to graphs of the same case.
ChangeSet diff(const ArgumentGraph& base, const ArgumentGraph& target);

// Throws InvalidChange when an atom cannot be applied to the current state.
void apply(ArgumentGraph& graph, const ChangeSet& changes);

// The ids a change touches (edge endpoints, the changed node). Used for
// incremental re-evaluation seeding.
std::vector<std::string> touched_ids(const Change& change);

std::string to_text(const ChangeSet& changes);

}  // namespace gsn
