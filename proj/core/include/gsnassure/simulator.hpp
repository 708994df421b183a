#pragma once
// Swiss-cheese breach model over the runtime layers L1..L5. Layers block
// independently per attempt; an attempt that passes every configured layer is
// a breach and yields an incident record ready for ledger ingestion.
//
// Randomness is reproducible and aggregation-order independent: every trial
// draws from its own splitmix64 stream seeded by mix(seed, class index,
// trial index), so trial t of class c produces the same draws no matter how
// trials are batched or parallelized.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gsnassure/incidents.hpp"

namespace gsn {

// splitmix64 (Steele, Lea, Vigna); the library's only random source.
struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit mantissa.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

SplitMix64 trial_stream(std::uint64_t seed, AttackClass cls, std::uint64_t trial);

struct LayerConfig {
  Layer layer = Layer::L1_UpstreamInterface;
  std::map<AttackClass, double> block;  // missing class = block 0
};

struct SimConfig {
  std::vector<LayerConfig> layers;               // pipeline order L1..L5, unique
  std::map<AttackClass, std::uint64_t> traffic;  // trials per class
  double unintended_given_breach = 1.0;
  std::map<ConsequenceClass, double> consequence_distribution;  // sums to 1
  std::uint64_t seed = 0;
  std::uint64_t session_turns = 1;  // group every k trials under one session token
};

// Throws InvalidConfig: layer order/duplicates, probabilities outside [0,1],
// distribution not summing to 1 within 1e-9, L6 in the pipeline.
void check_config(const SimConfig& config);

// Product over configured layers of (1 - block[class]).
double analytic_breach_probability(const SimConfig& config, AttackClass cls);

struct ClassOutcome {
  std::uint64_t trials = 0;
  std::uint64_t breaches = 0;
  std::map<Layer, std::uint64_t> blocks;  // per configured layer

  double breach_rate() const {
    return trials == 0 ? 0.0 : static_cast<double>(breaches) / static_cast<double>(trials);
  }
};

struct SimOutcome {
  std::map<AttackClass, ClassOutcome> per_class;
  std::vector<IncidentEvent> incidents;  // breaches only, ingestion-ready

  std::string to_text(const SimConfig& config) const;
};

// Deterministic under (config, seed). Throws InvalidConfig.
SimOutcome run_simulation(const SimConfig& config);

SimConfig sim_config_from_json_text(const std::string& text);  // throws InvalidConfig
SimConfig load_sim_config(const std::string& path);            // throws IoError

}  // namespace gsn
