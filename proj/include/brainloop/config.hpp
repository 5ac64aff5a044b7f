#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "brainloop/episode.hpp"
#include "json.hpp"

namespace brainloop {

enum class BrainKind { oracle, noisy, remote };

struct BrainSettings {
  BrainKind kind = BrainKind::oracle;
  double sigma_px = 5.0;       // noisy
  double p_wrong_skill = 0.05;  // noisy
  std::string url;             // remote; BRAIN_URL overrides
  double timeout_s = 10.0;     // remote; BRAIN_TIMEOUT_S overrides
};

struct BenchmarkSettings {
  double floor = 0.0;                    // minimum success rate for every task
  std::map<std::string, double> floors;  // per-task overrides
  int workers = 0;                       // 0 = hardware concurrency
};

struct Config {
  std::uint64_t seed = 0;
  EpisodeConfig episode;
  BrainSettings brain;
  BenchmarkSettings benchmark;
};

// Sections: geometry, tracker, adapter, brain, benchmark, seed. Missing keys
// keep their defaults; unknown keys and out-of-range values throw ConfigError.
Config config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Config& c);
Config load_config(const std::string& path);
void validate(const Config& c);

// The subset that determines an episode; stored in trace headers.
nlohmann::json episode_config_to_json(const EpisodeConfig& e);
EpisodeConfig episode_config_from_json(const nlohmann::json& j);

std::string_view to_string(BrainKind k);
std::string_view to_string(TrackerKind k);

}  // namespace brainloop
