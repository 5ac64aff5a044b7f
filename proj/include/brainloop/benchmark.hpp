#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "brainloop/config.hpp"
#include "brainloop/episode.hpp"

namespace brainloop {

// Builds a fresh brain for one trial. Called from worker threads.
using BrainFactory = std::function<std::unique_ptr<Brain>(TaskId task, std::uint64_t seed)>;

// Brain selected by the config (oracle, noisy or remote).
BrainFactory brain_factory(const Config& cfg);

struct BatteryOptions {
  std::vector<TaskId> tasks;
  Config config;
  BrainFactory brain;
  std::string trace_dir;  // empty = keep no traces
  const std::atomic<bool>* cancel = nullptr;
  std::function<void(const EpisodeResult&)> progress;  // serialised by the pool
};

struct TaskSummary {
  TaskId task = TaskId::find;
  int trials = 0;
  int successes = 0;
  double rate = 0.0;
  double floor = 0.0;
};

struct BatteryReport {
  std::vector<EpisodeResult> trials;  // task order, then trial index
  std::vector<TaskSummary> tasks;
  bool complete = true;  // false if cancelled before every trial ran
  bool floors_met = true;
  // Mean of the per-task rates of each platform, or -1 without tasks.
  double overall_legged = -1.0;
  double overall_arm = -1.0;
};

BatteryReport run_battery(const BatteryOptions& opts);

// Published real-robot success rates, per task in TaskId order, for the
// report's reference rows. Never compared against.
struct ReferenceRow {
  std::string label;
  Platform platform;
  std::vector<double> rates;
  double overall;
};
std::vector<ReferenceRow> reference_rows();

std::string results_csv(const BatteryReport& r);
nlohmann::json results_json(const BatteryReport& r, const Config& cfg);
std::string report_markdown(const BatteryReport& r, const Config& cfg);
void write_reports(const BatteryReport& r, const Config& cfg, const std::string& out_dir);

std::string trace_filename(const EpisodeResult& r);

}  // namespace brainloop
