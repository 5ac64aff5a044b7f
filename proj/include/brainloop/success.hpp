#pragma once

#include "brainloop/simulator.hpp"
#include "brainloop/task.hpp"

namespace brainloop {

struct SuccessConfig {
  double find_radius = 0.5;         // m, footprint gap
  double interaction_radius = 1.0;  // m, footprint gap
  double track_radius = 0.5;        // m, footprint gap
  double track_seconds = 3.0;
  double drawer_open = 0.95;
};

// Instantaneous task predicate. For track it reports the "near" condition
// only; SuccessMonitor adds the dwell time.
bool success_predicate(TaskId task, const Simulator& sim, const SuccessConfig& cfg);

class SuccessMonitor {
 public:
  SuccessMonitor(TaskId task, SuccessConfig cfg) : task_(task), cfg_(cfg) {}
  // Call once per tick after stepping; true once the task is solved.
  bool update(const Simulator& sim);
  int streak() const { return streak_; }

 private:
  TaskId task_;
  SuccessConfig cfg_;
  int streak_ = 0;
};

}  // namespace brainloop
