#include <numbers>

#include "brainloop/simulator.hpp"
#include "doctest.h"

using namespace brainloop;
using doctest::Approx;

namespace {

WorldObject box_obj(int id, ObjectClass cls, Eigen::Vector3d c, Eigen::Vector3d h, double yaw = 0.0) {
  WorldObject o;
  o.id = id;
  o.cls = cls;
  o.center = c;
  o.half_extents = h;
  o.yaw = yaw;
  return o;
}

// Point-in-rotated-rectangle, written out independently of footprint_distance.
bool inside_footprint(const WorldObject& o, double x, double y) {
  const double dx = x - o.center.x(), dy = y - o.center.y();
  const double c = std::cos(o.yaw), s = std::sin(o.yaw);
  return std::abs(c * dx + s * dy) <= o.half_extents.x() && std::abs(-s * dx + c * dy) <= o.half_extents.y();
}

ArmWorld carrot_world(Eigen::Vector3d at, double yaw) {
  ArmWorld w;
  WorldObject o = box_obj(1, ObjectClass::carrot, at, {0.07, 0.015, 0.015}, yaw);
  o.place = {PlaceKind::table, -1};
  w.objects.push_back(o);
  w.target_id = 1;
  return w;
}

}  // namespace

TEST_CASE("legged Euler integration") {
  LeggedWorld w;
  step_legged(w, {1, 0, 0});
  CHECK(w.robot.pose.x == Approx(1.0 / 15));
  CHECK(w.robot.pose.y == 0.0);
  LeggedWorld t;
  for (int i = 0; i < 15; ++i) step_legged(t, {0, 0, std::numbers::pi});
  CHECK(t.robot.pose.yaw == Approx(std::numbers::pi));
  // body-frame lateral motion at yaw pi/2 moves along world -x
  LeggedWorld l;
  l.robot.pose.yaw = std::numbers::pi / 2;
  step_legged(l, {0, 1.5, 0});
  CHECK(l.robot.pose.x == Approx(-0.1));
  CHECK(l.robot.pose.y == Approx(0.0));
}

TEST_CASE("collision on the first penetrating tick") {
  LeggedWorld w;
  w.objects.push_back(box_obj(5, ObjectClass::obstacle, {1.25, 0, 0.4}, {0.25, 0.5, 0.4}));
  // the footprint touches the face at x = 1.0 once x > 0.7; x_k = k / 15
  int first = -1;
  for (int k = 1; k <= 20 && first < 0; ++k) {
    step_legged(w, {1, 0, 0});
    if (w.collided) first = k;
  }
  CHECK(first == 11);
  // balls are not solid
  LeggedWorld b;
  WorldObject ball;
  ball.id = 1;
  ball.cls = ObjectClass::ball;
  ball.shape = ShapeKind::sphere;
  ball.half_extents = Eigen::Vector3d::Constant(0.12);
  ball.center = {0.2, 0, 0.12};
  b.objects.push_back(ball);
  step_legged(b, {0, 0, 0});
  CHECK_FALSE(b.collided);
  // the arena wall is
  LeggedWorld a;
  a.robot.pose.x = 7.69;
  step_legged(a, {1, 0, 0});
  CHECK(a.collided);
}

TEST_CASE("legged skills") {
  LeggedWorld w;
  w.objects.push_back(box_obj(1, ObjectClass::container, {0.85, 0, 0.2}, {0.25, 0.25, 0.2}));
  WorldObject item = box_obj(2, ObjectClass::pepper, {0, 0, 0}, {0.04, 0.03, 0.02});
  item.place = {PlaceKind::basket, -1};
  w.objects.push_back(item);
  w.robot.basket = {2};
  const SkillOutcome ok = apply_legged_skill(w, Skill::dump);
  CHECK(ok.ok);
  CHECK(w.object(2)->place == Placement{PlaceKind::container, 1});
  CHECK(w.robot.basket.empty());
  CHECK_FALSE(apply_legged_skill(w, Skill::dump).ok);

  LeggedWorld far = w;
  far.object(2)->place = {PlaceKind::basket, -1};
  far.robot.basket = {2};
  far.robot.pose.yaw = std::numbers::pi;  // crate behind
  CHECK_FALSE(apply_legged_skill(far, Skill::dump).ok);
  CHECK(far.object(2)->place.kind == PlaceKind::ground);

  LeggedWorld m;
  apply_legged_skill(m, Skill::turn_left);
  CHECK(m.robot.pose.yaw == Approx(std::numbers::pi / 2));
  apply_legged_skill(m, Skill::jump);
  CHECK(m.robot.pose.y == Approx(0.5));
  apply_legged_skill(m, Skill::sit);
  CHECK(m.robot.posture == "sit");
}

TEST_CASE("moving target follows its waypoint loop") {
  LeggedWorld w;
  WorldObject b = box_obj(1, ObjectClass::ball, {2, 0, 0.12}, Eigen::Vector3d::Constant(0.12));
  b.shape = ShapeKind::sphere;
  b.motion = Motion{{{2, 0}, {2.3, 0}}, 0.3, 1};
  w.objects.push_back(b);
  for (int i = 0; i < 15; ++i) step_legged(w, {});
  CHECK(w.object(1)->center.x() == Approx(2.3));
  for (int i = 0; i < 5; ++i) step_legged(w, {});
  CHECK(w.object(1)->center.x() == Approx(2.2));
}

TEST_CASE("legged camera sees straight ahead at the principal point") {
  const Pose2 pose{1, 2, 0.7};
  const CameraModel cam = legged_camera(pose);
  cam.validate();
  const double d = 2.0, reach = legged::kCameraForward + d;
  const Point3 ahead{1 + reach * std::cos(0.7), 2 + reach * std::sin(0.7), legged::kCameraHeight};
  const Pixel px = project(world_to_camera(ahead, cam), cam);
  CHECK(px.u == Approx(79.5));
  CHECK(px.v == Approx(59.5));
  CHECK(world_to_camera(ahead, cam).z == Approx(d));
}

TEST_CASE("arm grasp, release and pull") {
  ArmWorld w = carrot_world({0, 0.2, 0.015}, 0.0);
  w.ee = {0.02, 0.2, 0.015};
  w.ee_yaw = 0.0;  // parallel to the long axis
  CHECK_FALSE(apply_arm_skill(w, Skill::grasp).ok);
  w.ee_yaw = std::numbers::pi / 2;
  CHECK(apply_arm_skill(w, Skill::grasp).ok);
  CHECK(w.held == 1);
  CHECK(w.object(1)->place.kind == PlaceKind::gripper);

  // carry it over the box and drop
  const GraspPose over{{w.box_center.x(), w.box_center.y(), 0.2}, std::numbers::pi / 2, GraspMode::grasp};
  for (int i = 0; i < w.motion_ticks; ++i) step_arm(w, over);
  CHECK(w.ee == over.position);
  CHECK(w.object(1)->center.x() == Approx(w.box_center.x() - 0.02));
  CHECK(apply_arm_skill(w, Skill::release).ok);
  CHECK(w.object(1)->place == Placement{PlaceKind::container, 100});
  CHECK(w.object(1)->center.z() == Approx(0.015));
  CHECK(inside_box(w, w.object(1)->center));

  ArmWorld far = carrot_world({0, 0.2, 0.015}, 0.0);
  far.ee = {0.035, 0.2, 0.015};
  far.ee_yaw = std::numbers::pi / 2;
  CHECK_FALSE(apply_arm_skill(far, Skill::grasp).ok);

  ArmWorld d;
  CHECK(d.drawer == 0.5);
  CHECK_FALSE(apply_arm_skill(d, Skill::pull).ok);
  d.ee = handle_center(d);
  CHECK(apply_arm_skill(d, Skill::pull).ok);
  CHECK(d.drawer == 1.0);
  CHECK(d.ee.y == Approx(handle_center(d).y));
}

TEST_CASE("arm motion settles after motion_ticks") {
  ArmWorld w;
  const GraspPose g{{0.1, 0.3, 0.05}, 0.4, GraspMode::grasp};
  for (int i = 1; i < w.motion_ticks; ++i) {
    step_arm(w, g);
    CHECK(w.motion_ticks_left == w.motion_ticks - i);
  }
  step_arm(w, g);
  CHECK(w.motion_ticks_left == 0);
  CHECK(w.ee == g.position);
  CHECK(w.ee_yaw == 0.4);
}

TEST_CASE("drawer geometry") {
  ArmWorld w;
  CHECK(tray_front_y(0.5) == Approx(0.55 - 0.12));
  CHECK(tray_front_y(1.0) == Approx(0.31));
  Placement p;
  support_height(w, arm::kTrayCenterX, tray_front_y(0.5) + 0.1, &p);
  CHECK(p.kind == PlaceKind::drawer);
  CHECK(support_height(w, 0.0, 0.2, &p) == 0.0);
  CHECK(p.kind == PlaceKind::table);
}

TEST_CASE("generated scenes are deterministic and round-trip through JSON") {
  for (const auto& t : all_tasks()) {
    for (std::uint64_t seed : {0ULL, 7ULL, 123456789ULL}) {
      const Simulator a = generate_scene({t.id, seed, 3});
      const Simulator b = generate_scene({t.id, seed, 3});
      CHECK(a.state_hash() == b.state_hash());
      CHECK(scene_to_json(a) == scene_to_json(b));
      const Simulator c = scene_from_json(nlohmann::json::parse(scene_to_json(a).dump()));
      CHECK(c.state_hash() == a.state_hash());
      CHECK(a.platform() == t.platform);
    }
  }
  CHECK(generate_scene({TaskId::find, 1, 0}).state_hash() != generate_scene({TaskId::find, 2, 0}).state_hash());
}

TEST_CASE("complex layouts always block the straight path") {
  for (TaskId t : {TaskId::complex_find, TaskId::complex_interaction, TaskId::complex_transport}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Simulator s = generate_scene({t, seed, static_cast<int>(seed % 20)});
      const LeggedWorld& w = *s.legged();
      Eigen::Vector2d goal;
      if (const auto* o = w.object(w.target_id)) goal = o->center.head<2>();
      else goal = {w.human(w.target_id)->pose.x, w.human(w.target_id)->pose.y};
      const Eigen::Vector2d start(w.robot.pose.x, w.robot.pose.y);
      bool blocked = false;
      for (const auto& o : w.objects) {
        if (o.cls != ObjectClass::obstacle) continue;
        for (int i = 0; i <= 1000 && !blocked; ++i) {
          const Eigen::Vector2d p = start + (goal - start) * (i / 1000.0);
          blocked = inside_footprint(o, p.x(), p.y());
        }
      }
      CHECK(blocked);
      CHECK_FALSE(robot_collides(w, w.robot.pose));
    }
  }
}

TEST_CASE("task layouts") {
  const Simulator lh = generate_scene({TaskId::lh_carrot, 4, 0});
  const ArmWorld& a = *lh.arm();
  CHECK(a.drawer == 0.5);
  CHECK(inside_drawer(a, a.object(a.target_id)->center));
  const Simulator in = generate_scene({TaskId::banana_in, 4, 0});
  CHECK_FALSE(inside_box(*in.arm(), in.arm()->object(1)->center));
  const Simulator out = generate_scene({TaskId::kiwifruit_out, 4, 0});
  CHECK(inside_box(*out.arm(), out.arm()->object(1)->center));
  for (int trial = 0; trial < 20; ++trial) {
    const Simulator s = generate_scene({TaskId::interaction, 1, trial});
    CHECK(s.legged()->humans.at(0).gesture == gesture_for_trial(TaskId::interaction, trial));
  }
  const Simulator tr = generate_scene({TaskId::transport, 2, 0});
  CHECK_FALSE(tr.legged()->robot.basket.empty());
}

TEST_CASE("observe fills frame data") {
  const Simulator s = generate_scene({TaskId::find, 3, 0});
  const Observation o = s.observe(5, true);
  CHECK(o.frame_id == 5);
  CHECK(o.rendered);
  CHECK(o.rgb.width == 160);
  CHECK(o.depth.height == 120);
  REQUIRE(o.scene);
  const Observation quick = s.observe(6, false);
  CHECK_FALSE(quick.rendered);
  CHECK(quick.depth.data.empty());
  const Simulator arm = generate_scene({TaskId::banana_in, 3, 0});
  const Observation ao = arm.observe(0);
  REQUIRE(ao.ee_position);
  CHECK(ao.ee_settled);
}
