#include "gsnassure/simulator.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gsn {

SplitMix64 trial_stream(std::uint64_t seed, AttackClass cls, std::uint64_t trial) {
  // Decorrelate the three inputs before mixing them into one stream state.
  SplitMix64 mixer{seed};
  std::uint64_t a = mixer.next();
  std::uint64_t b = static_cast<std::uint64_t>(cls) * 0x9e3779b97f4a7c15ull;
  return SplitMix64{a ^ b ^ (trial * 0xd1b54a32d192ed03ull)};
}

void check_config(const SimConfig& config) {
  int last_layer = -1;
  for (const LayerConfig& lc : config.layers) {
    int index = static_cast<int>(lc.layer);
    if (lc.layer == Layer::L6_ReasoningReporting)
      throw GsnError(ErrorCode::InvalidConfig, "L6 is the meta-layer, not a runtime layer");
    if (index <= last_layer)
      throw GsnError(ErrorCode::InvalidConfig,
                     "layers must appear in pipeline order L1..L5, each at most once");
    last_layer = index;
    for (const auto& [cls, p] : lc.block) {
      if (!(p >= 0.0 && p <= 1.0))
        throw GsnError(ErrorCode::InvalidConfig,
                       std::string("block probability for ") + attack_class_token(cls) +
                           " at " + layer_token(lc.layer) + " outside [0,1]");
    }
  }
  if (!(config.unintended_given_breach >= 0.0 && config.unintended_given_breach <= 1.0))
    throw GsnError(ErrorCode::InvalidConfig, "unintended_given_breach outside [0,1]");
  double total = 0.0;
  for (const auto& [cls, p] : config.consequence_distribution) {
    if (!(p >= 0.0 && p <= 1.0))
      throw GsnError(ErrorCode::InvalidConfig,
                     std::string("consequence probability for ") + consequence_token(cls) +
                         " outside [0,1]");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw GsnError(ErrorCode::InvalidConfig, "consequence distribution must sum to 1");
  if (config.session_turns == 0)
    throw GsnError(ErrorCode::InvalidConfig, "session_turns must be >= 1");
}

namespace {

double block_probability(const LayerConfig& lc, AttackClass cls) {
  auto it = lc.block.find(cls);
  return it == lc.block.end() ? 0.0 : it->second;
}

ConsequenceClass draw_consequence(const SimConfig& config, double u) {
  double acc = 0.0;
  ConsequenceClass last = ConsequenceClass::None;
  for (int i = 0; i < kConsequenceClassCount; ++i) {
    ConsequenceClass cls = static_cast<ConsequenceClass>(i);
    auto it = config.consequence_distribution.find(cls);
    if (it == config.consequence_distribution.end()) continue;
    acc += it->second;
    last = cls;
    if (u < acc) return cls;
  }
  return last;  // u landed in the rounding tail
}

// Deterministic synthetic timestamp: fixed epoch plus one second per event.
std::string synthetic_timestamp(std::uint64_t event_index) {
  std::uint64_t total = event_index;
  std::uint64_t secs = total % 60;
  std::uint64_t mins = (total / 60) % 60;
  std::uint64_t hours = (total / 3600) % 24;
  std::uint64_t days = total / 86400;  // stays in January for sane volumes
  char buf[32];
  std::snprintf(buf, sizeof(buf), "2026-01-%02lluT%02llu:%02llu:%02lluZ",
                static_cast<unsigned long long>(1 + days % 28),
                static_cast<unsigned long long>(hours), static_cast<unsigned long long>(mins),
                static_cast<unsigned long long>(secs));
  return buf;
}

}  // namespace

double analytic_breach_probability(const SimConfig& config, AttackClass cls) {
  double pass = 1.0;
  for (const LayerConfig& lc : config.layers) pass *= 1.0 - block_probability(lc, cls);
  return pass;
}

SimOutcome run_simulation(const SimConfig& config) {
  check_config(config);
  SimOutcome outcome;
  std::uint64_t event_index = 0;

  for (const auto& [cls, trials] : config.traffic) {
    ClassOutcome& co = outcome.per_class[cls];
    co.trials = trials;
    for (const LayerConfig& lc : config.layers) co.blocks[lc.layer] = 0;

    for (std::uint64_t trial = 0; trial < trials; ++trial) {
      SplitMix64 stream = trial_stream(config.seed, cls, trial);
      std::optional<Layer> blocked;
      for (const LayerConfig& lc : config.layers) {
        if (stream.next_unit() < block_probability(lc, cls)) {
          blocked = lc.layer;
          break;
        }
      }
      if (blocked) {
        co.blocks[*blocked]++;
        continue;
      }
      co.breaches++;

      IncidentEvent event;
      event.timestamp = synthetic_timestamp(event_index++);
      event.attack_class = cls;
      event.unintended = stream.next_unit() < config.unintended_given_breach;
      // Intended output never fabricates a downstream consequence.
      event.consequence = event.unintended ? draw_consequence(config, stream.next_unit())
                                           : ConsequenceClass::None;
      if (config.session_turns > 1)
        event.session = std::string("sess-") + attack_class_token(cls) + "-" +
                        std::to_string(trial / config.session_turns);
      event.notes = std::string("simulated ") + attack_class_token(cls) + " trial " +
                    std::to_string(trial);
      outcome.incidents.push_back(std::move(event));
    }
  }
  return outcome;
}

std::string SimOutcome::to_text(const SimConfig& config) const {
  std::ostringstream os;
  os << "seed: " << config.seed << "\n";
  for (const auto& [cls, co] : per_class) {
    os << attack_class_token(cls) << ": trials " << co.trials << ", breaches " << co.breaches;
    char rate[32];
    std::snprintf(rate, sizeof(rate), "%.6f", co.breach_rate());
    char analytic[32];
    std::snprintf(analytic, sizeof(analytic), "%.6f",
                  analytic_breach_probability(config, cls));
    os << " (rate " << rate << ", analytic " << analytic << ")\n";
    for (const auto& [layer, count] : co.blocks)
      os << "  blocked at " << layer_token(layer) << ": " << count << "\n";
  }
  os << "incidents generated: " << incidents.size() << "\n";
  return os.str();
}

namespace {

using ordered_json = nlohmann::ordered_json;

}  // namespace

SimConfig sim_config_from_json_text(const std::string& text) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw GsnError(ErrorCode::InvalidConfig, "simulation config is not valid JSON");
  SimConfig config;
  try {
    config.seed = j.value("seed", 0ull);
    config.session_turns = j.value("session_turns", 1ull);
    config.unintended_given_breach = j.value("unintended_given_breach", 1.0);
    if (j.contains("consequence_distribution")) {
      for (const auto& [key, value] : j.at("consequence_distribution").items()) {
        auto cls = consequence_from_token(key);
        if (!cls)
          throw GsnError(ErrorCode::InvalidConfig, "unknown consequence class '" + key + "'");
        config.consequence_distribution[*cls] = value.get<double>();
      }
    } else {
      config.consequence_distribution[ConsequenceClass::None] = 1.0;
    }
    const ordered_json layers = j.value("layers", ordered_json::array());
    for (const auto& layer_json : layers) {
      LayerConfig lc;
      auto layer = layer_from_token(layer_json.at("layer").get<std::string>());
      if (!layer) throw GsnError(ErrorCode::InvalidConfig, "unknown layer in config");
      lc.layer = *layer;
      for (const auto& [key, value] : layer_json.at("block").items()) {
        auto cls = attack_class_from_token(key);
        if (!cls) throw GsnError(ErrorCode::InvalidConfig, "unknown attack class '" + key + "'");
        lc.block[*cls] = value.get<double>();
      }
      config.layers.push_back(std::move(lc));
    }
    const ordered_json traffic = j.value("traffic", ordered_json::object());
    for (const auto& [key, value] : traffic.items()) {
      auto cls = attack_class_from_token(key);
      if (!cls) throw GsnError(ErrorCode::InvalidConfig, "unknown attack class '" + key + "'");
      config.traffic[*cls] = value.get<std::uint64_t>();
    }
  } catch (const ordered_json::exception& e) {
    throw GsnError(ErrorCode::InvalidConfig, std::string("simulation config: ") + e.what());
  }
  check_config(config);
  return config;
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GsnError(ErrorCode::IoError, "cannot read simulation config '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sim_config_from_json_text(buffer.str());
}

}  // namespace gsn
