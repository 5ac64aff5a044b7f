#include "brainloop/simulator.hpp"

#include "brainloop/hash.hpp"

namespace brainloop {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void hash_object(Fnv1a& h, const WorldObject& o) {
  h.i64(o.id);
  h.i64(static_cast<int>(o.cls));
  for (int i = 0; i < 3; ++i) h.f64(o.center[i]);
  h.f64(o.yaw);
  h.i64(static_cast<int>(o.place.kind));
  h.i64(o.place.container_id);
  if (o.motion) h.i64(static_cast<std::int64_t>(o.motion->next));
}

}  // namespace

std::string_view to_string(PlaceKind k) {
  switch (k) {
    case PlaceKind::ground: return "ground";
    case PlaceKind::table: return "table";
    case PlaceKind::basket: return "basket";
    case PlaceKind::container: return "container";
    case PlaceKind::gripper: return "gripper";
    case PlaceKind::drawer: return "drawer";
  }
  return "";
}

Shape WorldObject::shape_value() const {
  if (shape == ShapeKind::sphere) return Sphere{center, radius()};
  return Box{center, half_extents, yaw};
}

Simulator::Simulator(LeggedWorld w, RenderOptions opts) : world_(std::move(w)), opts_(opts) {}
Simulator::Simulator(ArmWorld w, RenderOptions opts) : world_(std::move(w)), opts_(opts) {}

Platform Simulator::platform() const {
  return std::holds_alternative<LeggedWorld>(world_) ? Platform::legged : Platform::arm;
}

Observation Simulator::observe(std::int64_t frame_id, bool render) const {
  Observation obs;
  obs.frame_id = frame_id;
  if (const auto* w = legged()) {
    obs.camera = legged_camera(w->robot.pose);
    obs.mount = legged_camera_mount();
    obs.scene = std::make_shared<const Scene>(legged_scene(*w));
  } else {
    const auto& a = *arm();
    obs.camera = arm_camera();
    obs.mount = obs.camera.extrinsics;
    obs.scene = std::make_shared<const Scene>(arm_scene(a));
    obs.ee_position = a.ee;
    obs.ee_settled = a.motion_ticks_left == 0;
  }
  if (render) {
    render_into(*obs.scene, obs.camera, opts_, obs.rgb, obs.depth);
    obs.rendered = true;
  }
  return obs;
}

void Simulator::step(const ControlCommand& cmd) {
  std::visit(overloaded{
                 [&](LeggedWorld& w) {
                   const auto* v = std::get_if<VelocityCommand>(&cmd);
                   step_legged(w, v ? *v : VelocityCommand{});
                 },
                 [&](ArmWorld& w) {
                   const auto* g = std::get_if<GraspPose>(&cmd);
                   step_arm(w, g ? std::optional<GraspPose>(*g) : std::nullopt);
                 },
             },
             world_);
}

SkillOutcome Simulator::apply_skill(Skill skill) {
  return std::visit(overloaded{
                        [&](LeggedWorld& w) { return apply_legged_skill(w, skill); },
                        [&](ArmWorld& w) { return apply_arm_skill(w, skill); },
                    },
                    world_);
}

bool Simulator::collided() const {
  const auto* w = legged();
  return w && w->collided;
}

std::uint64_t Simulator::state_hash() const {
  Fnv1a h;
  if (const auto* w = legged()) {
    h.str("legged");
    h.f64(w->robot.pose.x);
    h.f64(w->robot.pose.y);
    h.f64(w->robot.pose.yaw);
    h.str(w->robot.posture);
    for (int id : w->robot.basket) h.i64(id);
    for (const auto& o : w->objects) hash_object(h, o);
    for (const auto& hu : w->humans) {
      h.i64(hu.id);
      h.f64(hu.pose.x);
      h.f64(hu.pose.y);
      h.f64(hu.pose.yaw);
      h.i64(static_cast<int>(hu.gesture));
    }
    h.i64(w->collided);
  } else {
    const auto& a = *arm();
    h.str("arm");
    h.f64(a.ee.x);
    h.f64(a.ee.y);
    h.f64(a.ee.z);
    h.f64(a.ee_yaw);
    h.i64(static_cast<int>(a.gripper));
    h.i64(a.held ? *a.held : -1);
    h.f64(a.drawer);
    h.i64(a.motion_ticks_left);
    for (const auto& o : a.objects) hash_object(h, o);
  }
  return h.value();
}

std::vector<double> Simulator::pose_summary() const {
  if (const auto* w = legged()) return {w->robot.pose.x, w->robot.pose.y, w->robot.pose.yaw};
  const auto& a = *arm();
  return {a.ee.x, a.ee.y, a.ee.z};
}

}  // namespace brainloop
