#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "brainloop/decision.hpp"
#include "brainloop/geometry.hpp"
#include "brainloop/simulator.hpp"
#include "brainloop/tracker.hpp"

namespace brainloop {

enum class Mode { await_brain, moving, executing_skill, done, failed };
enum class FailCause { none, invalid_decision, brain_unavailable, timeout, collision, internal_error };
enum class TakeoverCause { keypoints_lost, subtask_done, skill_complete };

std::string_view to_string(Mode m);
std::string_view to_string(FailCause c);
std::string_view to_string(TakeoverCause c);

inline constexpr size_t kSkillCount = static_cast<size_t>(Skill::pull) + 1;

struct AdapterConfig {
  VelocityLimits limits;
  double reach_radius = 0.25;  // metres, horizontal, camera to waypoint
  int lost_frames = 5;         // K
  LostPolicy lost_policy = LostPolicy::all;
  int fill_radius = 3;
  std::array<int, kSkillCount> skill_ticks = default_skill_ticks();

  static std::array<int, kSkillCount> default_skill_ticks();
  int duration(Skill s) const { return skill_ticks[static_cast<size_t>(s)]; }
};

struct TakeoverEvent {
  std::int64_t tick = 0;
  TakeoverCause cause = TakeoverCause::subtask_done;
  std::string snapshot;
};

struct AdapterState {
  Mode mode = Mode::await_brain;
  int waypoint = 0;             // Moving
  int stalled = 0;              // Moving ticks without a usable keypoint
  Skill skill = Skill::walk;    // ExecutingSkill
  int ticks_remaining = 0;      // ExecutingSkill
  FailCause cause = FailCause::none;
  TrackerState tracker;
  std::optional<Decision> decision;
  std::optional<GraspPose> arm_target;
  std::int64_t tick = -1;
};

struct TickOutput {
  ControlCommand command;
  std::optional<TakeoverEvent> event;
  std::optional<Skill> completed_skill;  // the caller applies its effect
  std::optional<Point3> waypoint_world;
};

class Adapter {
 public:
  Adapter(AdapterConfig cfg, Platform platform, std::unique_ptr<PointTracker> tracker);

  const AdapterState& state() const { return state_; }
  const AdapterConfig& config() const { return cfg_; }

  // Accepts a decision while awaiting the brain. Throws DomainError (state
  // untouched) for decisions the platform cannot act on; `frame` is the
  // observation the brain answered.
  void on_brain_decision(const Decision& d, const Observation& frame);

  // One control period. Precondition: mode is moving or executing_skill and
  // frame.frame_id is newer than any frame seen before.
  TickOutput control_tick(const Observation& frame);

  void finish(bool success, FailCause cause = FailCause::none);

 private:
  TickOutput tick_legged(const Observation& frame);
  TickOutput tick_arm(const Observation& frame);
  TakeoverEvent takeover(TakeoverCause cause, std::int64_t tick);
  void start_skill(Skill s);

  AdapterConfig cfg_;
  Platform platform_;
  std::unique_ptr<PointTracker> tracker_;
  AdapterState state_;
};

}  // namespace brainloop
