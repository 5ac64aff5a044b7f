#include "brainloop/adapter.hpp"

#include <cmath>
#include <sstream>

#include "brainloop/errors.hpp"

namespace brainloop {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::await_brain: return "AwaitBrain";
    case Mode::moving: return "Moving";
    case Mode::executing_skill: return "ExecutingSkill";
    case Mode::done: return "Done";
    case Mode::failed: return "Failed";
  }
  return "";
}

std::string_view to_string(FailCause c) {
  switch (c) {
    case FailCause::none: return "";
    case FailCause::invalid_decision: return "InvalidDecision";
    case FailCause::brain_unavailable: return "BrainUnavailable";
    case FailCause::timeout: return "Timeout";
    case FailCause::collision: return "Collision";
    case FailCause::internal_error: return "InternalError";
  }
  return "";
}

std::string_view to_string(TakeoverCause c) {
  switch (c) {
    case TakeoverCause::keypoints_lost: return "KeypointsLost";
    case TakeoverCause::subtask_done: return "SubtaskDone";
    case TakeoverCause::skill_complete: return "SkillComplete";
  }
  return "";
}

std::array<int, kSkillCount> AdapterConfig::default_skill_ticks() {
  std::array<int, kSkillCount> t{};
  t.fill(15);
  auto set = [&](Skill s, int n) { t[static_cast<size_t>(s)] = n; };
  set(Skill::dump, 30);
  set(Skill::sit, 15);
  // a quarter turn at yaw_max = 1 rad/s
  set(Skill::turn_left, 23);
  set(Skill::turn_right, 23);
  set(Skill::jump, 10);
  set(Skill::heart, 30);
  set(Skill::wallow, 30);
  set(Skill::walk, 1);
  set(Skill::grasp, 10);
  set(Skill::release, 10);
  set(Skill::pull, 20);
  return t;
}

Adapter::Adapter(AdapterConfig cfg, Platform platform, std::unique_ptr<PointTracker> tracker)
    : cfg_(cfg), platform_(platform), tracker_(std::move(tracker)) {
  if (!tracker_) throw Error("adapter needs a tracker");
}

void Adapter::on_brain_decision(const Decision& d, const Observation& frame) {
  if (state_.mode != Mode::await_brain) throw Error("decision delivered outside AwaitBrain");
  if (d.skill.platform != platform_ || !in_policy_pool(d.skill)) {
    throw DomainError("skill " + std::string(skill_name(d.skill.skill)) + " is not available on " +
                      std::string(to_string(platform_)));
  }
  if (platform_ == Platform::arm && !d.keypoints.empty() && d.keypoints.size() != 2) {
    throw DomainError("arm decisions take exactly two keypoints");
  }
  if (d.keypoints.empty()) {
    if (d.skill.skill == Skill::walk) {
      state_.decision = d;
      state_.mode = Mode::failed;
      state_.cause = FailCause::invalid_decision;
      return;
    }
    state_.tracker = TrackerState{{}, frame.frame_id};
    state_.decision = d;
    start_skill(d.skill.skill);
    return;
  }
  TrackerState tracks = tracker_->init_tracks(frame, d.keypoints);
  state_.tracker = std::move(tracks);
  state_.decision = d;
  state_.arm_target.reset();
  state_.waypoint = 0;
  state_.stalled = 0;
  state_.mode = Mode::moving;
}

void Adapter::start_skill(Skill s) {
  state_.mode = Mode::executing_skill;
  state_.skill = s;
  state_.ticks_remaining = std::max(1, cfg_.duration(s));
}

void Adapter::finish(bool success, FailCause cause) {
  state_.mode = success ? Mode::done : Mode::failed;
  state_.cause = success ? FailCause::none : cause;
}

TakeoverEvent Adapter::takeover(TakeoverCause cause, std::int64_t tick) {
  std::ostringstream snap;
  int visible = 0;
  for (const auto& p : state_.tracker.points) visible += p.visible ? 1 : 0;
  snap << "points=" << state_.tracker.points.size() << " visible=" << visible << " waypoint=" << state_.waypoint;
  if (cause == TakeoverCause::skill_complete) snap << " skill=" << skill_name(state_.skill);
  state_.mode = Mode::await_brain;
  return {tick, cause, snap.str()};
}

TickOutput Adapter::control_tick(const Observation& frame) {
  if (frame.frame_id <= state_.tick) throw OrderingError("control ticks must move forward");
  state_.tick = frame.frame_id;
  if (state_.mode == Mode::executing_skill) {
    TickOutput out;
    if (state_.arm_target) out.command = *state_.arm_target;
    if (--state_.ticks_remaining <= 0) {
      out.completed_skill = state_.skill;
      out.event = takeover(TakeoverCause::skill_complete, frame.frame_id);
    }
    return out;
  }
  if (state_.mode != Mode::moving) throw Error("control_tick outside Moving / ExecutingSkill");
  return platform_ == Platform::legged ? tick_legged(frame) : tick_arm(frame);
}

TickOutput Adapter::tick_legged(const Observation& frame) {
  TickOutput out;
  out.command = VelocityCommand{};
  state_.tracker = tracker_->update(state_.tracker, frame);
  auto& points = state_.tracker.points;
  TrackedPoint& active = points[static_cast<size_t>(state_.waypoint)];

  std::optional<double> depth;
  if (active.visible) {
    try {
      depth = sample_depth(frame.depth, active.pixel, cfg_.fill_radius);
    } catch (const DepthUnavailable&) {
      active.mark(false);
    }
  }
  state_.stalled = depth ? 0 : state_.stalled + 1;
  if (is_lost(state_.tracker, cfg_.lost_frames, cfg_.lost_policy) || state_.stalled >= cfg_.lost_frames) {
    out.event = takeover(TakeoverCause::keypoints_lost, frame.frame_id);
    return out;
  }
  if (!depth) return out;

  const Point3 cam_pt = unproject(active.pixel, *depth, frame.camera);
  const Point3 body = frame.mount.apply(cam_pt);
  out.waypoint_world = camera_to_world(cam_pt, frame.camera);
  const double reach =
      std::hypot(body.x - frame.mount.translation.x(), body.y - frame.mount.translation.y());
  if (reach >= cfg_.reach_radius) {
    out.command = velocity_command(body, cfg_.limits);
    return out;
  }
  if (static_cast<size_t>(++state_.waypoint) < points.size()) return out;
  --state_.waypoint;
  const Skill s = state_.decision->skill.skill;
  if (s == Skill::walk) {
    out.event = takeover(TakeoverCause::subtask_done, frame.frame_id);
  } else {
    start_skill(s);
  }
  return out;
}

TickOutput Adapter::tick_arm(const Observation& frame) {
  TickOutput out;
  state_.tracker = tracker_->update(state_.tracker, frame);
  if (!state_.arm_target) {
    const auto& pts = state_.tracker.points;
    if (pts[0].visible && pts[1].visible) {
      const Skill s = state_.decision->skill.skill;
      try {
        state_.arm_target = grasp_from_antipodal(pts[0].pixel, pts[1].pixel, frame.depth, frame.camera,
                                                 s == Skill::pull ? GraspMode::hook : GraspMode::grasp,
                                                 cfg_.fill_radius);
      } catch (const DepthUnavailable&) {
      } catch (const DomainError&) {
      }
    }
  }
  state_.stalled = state_.arm_target ? 0 : state_.stalled + 1;
  if (is_lost(state_.tracker, cfg_.lost_frames, cfg_.lost_policy) || state_.stalled >= cfg_.lost_frames) {
    out.event = takeover(TakeoverCause::keypoints_lost, frame.frame_id);
    return out;
  }
  if (!state_.arm_target) return out;
  out.command = *state_.arm_target;
  out.waypoint_world = state_.arm_target->position;
  if (frame.ee_settled && frame.ee_position &&
      distance(*frame.ee_position, state_.arm_target->position) < 1e-9) {
    start_skill(state_.decision->skill.skill);
  }
  return out;
}

}  // namespace brainloop
