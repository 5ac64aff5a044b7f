#include "brainloop/success.hpp"

#include <cmath>

namespace brainloop {

namespace {

bool legged_success(TaskId task, const LeggedWorld& w, const SuccessConfig& cfg) {
  if (w.collided) return false;
  switch (task) {
    case TaskId::find:
    case TaskId::complex_find: return robot_gap(w, w.target_id) < cfg.find_radius;
    case TaskId::track: return robot_gap(w, w.target_id) < cfg.track_radius;
    case TaskId::interaction:
    case TaskId::complex_interaction: {
      const Human* h = w.human(w.target_id);
      if (!h || robot_gap(w, h->id) >= cfg.interaction_radius) return false;
      const Skill want = skill_for_gesture(h->gesture);
      if (want == Skill::walk) return true;
      return w.robot.posture == skill_name(want);
    }
    case TaskId::transport:
    case TaskId::complex_transport: {
      bool any = false;
      for (const auto& o : w.objects) {
        if (o.cls == ObjectClass::container || o.cls == ObjectClass::obstacle) continue;
        any = true;
        if (o.place.kind != PlaceKind::container || o.place.container_id != w.target_id) return false;
      }
      return any;
    }
    default: return false;
  }
}

bool arm_success(TaskId task, const ArmWorld& a, const SuccessConfig& cfg) {
  const WorldObject* o = a.object(a.target_id);
  const bool released = a.gripper == GripperState::open && !a.held;
  switch (task) {
    case TaskId::banana_in:
    case TaskId::pepper_in: return o && released && inside_box(a, o->center);
    case TaskId::carrot_out:
    case TaskId::kiwifruit_out: return o && released && !inside_box(a, o->center) && o->place.kind == PlaceKind::table;
    case TaskId::open_drawer: return a.drawer >= cfg.drawer_open;
    case TaskId::lh_carrot:
    case TaskId::lh_pepper:
      return o && released && a.drawer >= cfg.drawer_open && !inside_drawer(a, o->center) &&
             o->place.kind == PlaceKind::table;
    default: return false;
  }
}

}  // namespace

bool success_predicate(TaskId task, const Simulator& sim, const SuccessConfig& cfg) {
  if (const auto* w = sim.legged()) return legged_success(task, *w, cfg);
  return arm_success(task, *sim.arm(), cfg);
}

bool SuccessMonitor::update(const Simulator& sim) {
  const bool now = success_predicate(task_, sim, cfg_);
  if (task_ != TaskId::track) return now;
  streak_ = now ? streak_ + 1 : 0;
  return streak_ >= static_cast<int>(std::lround(cfg_.track_seconds * kControlRateHz));
}

}  // namespace brainloop
