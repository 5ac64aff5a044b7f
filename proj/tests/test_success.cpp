#include "brainloop/success.hpp"
#include "doctest.h"

using namespace brainloop;

namespace {

Simulator find_world(double gap) {
  LeggedWorld w;
  WorldObject b;
  b.id = 1;
  b.cls = ObjectClass::ball;
  b.shape = ShapeKind::sphere;
  b.half_extents = Eigen::Vector3d::Constant(0.12);
  // footprint gap = centre distance - ball radius - robot radius
  b.center = {gap + 0.12 + legged::kRobotRadius, 0, 0.12};
  w.objects.push_back(b);
  w.target_id = 1;
  return Simulator(w);
}

}  // namespace

TEST_CASE("find thresholds") {
  const SuccessConfig cfg;
  CHECK(success_predicate(TaskId::find, find_world(0.49), cfg));
  CHECK_FALSE(success_predicate(TaskId::find, find_world(0.51), cfg));
  Simulator hit = find_world(0.1);
  hit.legged()->collided = true;
  CHECK_FALSE(success_predicate(TaskId::complex_find, hit, cfg));
}

TEST_CASE("track needs a dwell of track_seconds") {
  const SuccessConfig cfg;
  SuccessMonitor m(TaskId::track, cfg);
  const Simulator near = find_world(0.2), far = find_world(2.0);
  // 3 s at 15 Hz
  for (int i = 1; i < 45; ++i) CHECK_FALSE(m.update(near));
  CHECK_FALSE(m.update(far));
  CHECK(m.streak() == 0);
  for (int i = 1; i < 45; ++i) CHECK_FALSE(m.update(near));
  CHECK(m.update(near));
}

TEST_CASE("interaction requires the matching posture") {
  LeggedWorld w;
  Human h;
  h.id = 10;
  h.pose = {1.2, 0, 0};  // body face at 1.05, gap 0.75
  h.gesture = Gesture::sit;
  w.humans.push_back(h);
  w.target_id = 10;
  Simulator s(w);
  const SuccessConfig cfg;
  CHECK_FALSE(success_predicate(TaskId::interaction, s, cfg));
  s.legged()->robot.posture = "sit";
  CHECK(success_predicate(TaskId::interaction, s, cfg));
  s.legged()->robot.pose.x = -1.0;
  CHECK_FALSE(success_predicate(TaskId::interaction, s, cfg));
  s.legged()->humans[0].gesture = Gesture::come;
  s.legged()->robot.pose.x = 0.5;
  s.legged()->robot.posture = "stand";
  CHECK(success_predicate(TaskId::interaction, s, cfg));
}

TEST_CASE("transport: every item in the target crate") {
  LeggedWorld w;
  WorldObject crate;
  crate.id = 1;
  crate.cls = ObjectClass::container;
  crate.center = {3, 0, 0.2};
  crate.half_extents = {0.25, 0.25, 0.2};
  w.objects.push_back(crate);
  WorldObject item;
  item.id = 2;
  item.cls = ObjectClass::kiwifruit;
  item.place = {PlaceKind::container, 1};
  w.objects.push_back(item);
  w.target_id = 1;
  Simulator s(w);
  const SuccessConfig cfg;
  CHECK(success_predicate(TaskId::transport, s, cfg));
  s.legged()->collided = true;
  CHECK_FALSE(success_predicate(TaskId::transport, s, cfg));
  s.legged()->collided = false;
  s.legged()->objects[1].place = {PlaceKind::ground, -1};
  CHECK_FALSE(success_predicate(TaskId::transport, s, cfg));
}

TEST_CASE("arm predicates") {
  const SuccessConfig cfg;
  ArmWorld a;
  WorldObject carrot;
  carrot.id = 1;
  carrot.cls = ObjectClass::carrot;
  carrot.half_extents = {0.07, 0.015, 0.015};
  carrot.center = {0.0, 0.2, 0.015};
  carrot.place = {PlaceKind::table, -1};
  a.objects.push_back(carrot);
  a.target_id = 1;
  a.drawer = 0.95;
  Simulator s(a);
  CHECK(success_predicate(TaskId::lh_carrot, s, cfg));
  CHECK(success_predicate(TaskId::carrot_out, s, cfg));
  CHECK(success_predicate(TaskId::open_drawer, s, cfg));
  CHECK_FALSE(success_predicate(TaskId::banana_in, s, cfg));
  s.arm()->drawer = 0.94;
  CHECK_FALSE(success_predicate(TaskId::lh_carrot, s, cfg));
  CHECK_FALSE(success_predicate(TaskId::open_drawer, s, cfg));
  s.arm()->held = 1;
  s.arm()->gripper = GripperState::closed;
  CHECK_FALSE(success_predicate(TaskId::carrot_out, s, cfg));
  s.arm()->held.reset();
  s.arm()->gripper = GripperState::open;
  s.arm()->objects[0].center = {a.box_center.x(), a.box_center.y(), 0.015};
  CHECK(success_predicate(TaskId::banana_in, s, cfg));
}
