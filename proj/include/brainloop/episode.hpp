#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "brainloop/adapter.hpp"
#include "brainloop/brains.hpp"
#include "brainloop/simulator.hpp"
#include "brainloop/success.hpp"
#include "brainloop/tracker.hpp"
#include "json.hpp"

namespace brainloop {

enum class TrackerKind { oracle, patch };

struct TrackerSettings {
  TrackerKind kind = TrackerKind::oracle;
  OracleTrackerConfig oracle;
  PatchTrackerConfig patch;
};

struct EpisodeConfig {
  AdapterConfig adapter;
  TrackerSettings tracker;
  int latency_ticks = 30;
  int max_ticks = 1800;
  int retries = 2;
  int history = 4;
  SuccessConfig success;
};

std::unique_ptr<PointTracker> make_tracker(const TrackerSettings& s, std::uint64_t seed);

struct EpisodeResult {
  TaskId task = TaskId::find;
  std::uint64_t seed = 0;
  int trial = 0;
  bool success = false;
  FailCause cause = FailCause::none;
  int ticks = 0;
  int takeovers = 0;
  int keypoints_lost = 0;
  int queries = 0;
  int mode_violations = 0;  // AwaitBrain entries from Moving/ExecutingSkill without exactly one event
};

// Header record, one record per tick, end record.
struct EpisodeTrace {
  nlohmann::json header;
  std::vector<nlohmann::json> records;
  nlohmann::json end;
  EpisodeResult result;

  std::string to_ndjson() const;
};

struct EpisodeSetup {
  TaskId task = TaskId::find;
  std::uint64_t seed = 0;
  int trial = 0;
  std::optional<nlohmann::json> scene;  // overrides the generated layout
};

EpisodeTrace run_episode(const EpisodeSetup& setup, Brain& brain, const EpisodeConfig& cfg,
                         const std::atomic<bool>* cancel = nullptr);

// --- trace files ---------------------------------------------------------

struct ReplayReport {
  bool ok = true;
  std::int64_t divergent_tick = -1;  // first tick that differs
  std::string message;
  bool success = false;
};

void write_trace(const EpisodeTrace& trace, const std::string& path);
// Throws Error on unreadable or malformed files (the offending line is named).
EpisodeTrace read_trace(const std::string& path);
ReplayReport replay_trace(const std::string& path);

// 2D top-down plot: one polyline per trace, keypoint waypoints as dots and
// takeover events as crosses.
std::string trajectory_svg(const std::vector<EpisodeTrace>& traces);

}  // namespace brainloop
