#pragma once
// Guardrail registry over the six pipeline layers, coverage-gap computation
// against goal scopes, and the reconcile step that keeps machine-owned
// defeaters (`AUTO-<goal>-<class>`) in sync with the gaps. Human-authored
// defeaters are never touched.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gsnassure/argument.hpp"
#include "gsnassure/changeset.hpp"

namespace gsn {

enum class Layer {
  L1_UpstreamInterface,
  L2_InputDetection,
  L3_Model,
  L4_OutputDetection,
  L5_Downstream,
  L6_ReasoningReporting,
};

const char* layer_token(Layer layer);        // "L1".."L6"
const char* layer_description(Layer layer);
std::optional<Layer> layer_from_token(std::string_view token);

struct GuardrailRecord {
  std::string id;
  std::string name;
  Layer layer = Layer::L2_InputDetection;
  std::set<AttackClass> coverage;
  bool active = true;
  // (case name, solution id) pairs this guardrail evidences.
  std::set<std::pair<std::string, std::string>> linked_solutions;

  friend bool operator==(const GuardrailRecord&, const GuardrailRecord&) = default;
};

class GuardrailRegistry {
public:
  // Throws DuplicateId; active records need non-empty coverage
  // (EmptyCoverageWhileActive). Inactive records are retained for audit.
  const std::string& register_guardrail(const GuardrailRecord& record);

  // Throws UnknownGuardrail / EmptyCoverageWhileActive on reactivation of a
  // record without coverage.
  void set_active(const std::string& id, bool active);

  // Records the bidirectional association; idempotent. Throws NotASolution /
  // UnknownGuardrail.
  void link_evidence(const ArgumentGraph& graph, const std::string& solution,
                     const std::string& guardrail);

  bool contains(const std::string& id) const { return records_.count(id) != 0; }
  const GuardrailRecord* find(const std::string& id) const;
  const GuardrailRecord& record(const std::string& id) const;  // throws UnknownGuardrail
  const std::map<std::string, GuardrailRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  friend bool operator==(const GuardrailRegistry&, const GuardrailRegistry&) = default;

private:
  std::map<std::string, GuardrailRecord> records_;
};

struct CoverageGap {
  std::string case_name;
  std::string claim;   // goal id
  AttackClass missing;

  friend bool operator==(const CoverageGap&, const CoverageGap&) = default;
};

// For each goal with a non-empty scope: scope minus the union of coverage of
// active guardrails linked to solutions in the goal's SupportedBy descendant
// closure. Ordered by (goal id, class).
std::vector<CoverageGap> coverage_gaps(const GuardrailRegistry& registry,
                                       const ArgumentGraph& graph);

struct ReconcileResult {
  ChangeSet changes;
  // Active guardrails linked into this case whose coverage intersects no
  // in-scope class of any claim they evidence.
  std::vector<std::string> deprecation_candidates;
};

// Opens one AUTO defeater per uncovered gap (re-opening retired ones),
// retires AUTO defeaters whose gap has closed. Applying the returned changes
// and reconciling again yields an empty ChangeSet.
ReconcileResult reconcile_defeaters(const GuardrailRegistry& registry,
                                    const ArgumentGraph& graph);

std::string auto_defeater_id(const std::string& goal, AttackClass cls);

// Splits `AUTO-<goal>-<class>` back into its parts; nullopt for ids that do
// not match the machine-owned pattern.
std::optional<std::pair<std::string, AttackClass>> parse_auto_defeater_id(std::string_view id);

// One JSON object per line, stable field order.
std::string registry_to_text(const GuardrailRegistry& registry);
GuardrailRegistry registry_from_text(const std::string& text);  // throws InvalidConfig
GuardrailRegistry load_registry(const std::string& path);       // throws IoError
void save_registry(const GuardrailRegistry& registry, const std::string& path);

}  // namespace gsn
