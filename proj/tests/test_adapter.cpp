#include "brainloop/adapter.hpp"
#include "brainloop/errors.hpp"
#include "doctest.h"

using namespace brainloop;

namespace {

WorldObject ball_at(double x, double y) {
  WorldObject b;
  b.id = 1;
  b.cls = ObjectClass::ball;
  b.shape = ShapeKind::sphere;
  b.half_extents = Eigen::Vector3d::Constant(0.12);
  b.center = {x, y, 0.12};
  return b;
}

Adapter make_adapter(Platform p, int k = 5) {
  AdapterConfig cfg;
  cfg.lost_frames = k;
  return Adapter(cfg, p, std::make_unique<OracleTracker>(OracleTrackerConfig{}, 1));
}

Pixel pixel_of(const Observation& o, const Eigen::Vector3d& world) {
  return project(world_to_camera(Point3::from(world), o.camera), o.camera);
}

Decision decision(Platform p, Skill s, std::vector<Pixel> kps) {
  Decision d;
  d.skill = {p, s};
  d.keypoints = std::move(kps);
  return d;
}

}  // namespace

TEST_CASE("decision entry states") {
  LeggedWorld w;
  w.objects.push_back(ball_at(3, 0));
  Simulator sim(w);
  const Observation o = sim.observe(0);

  Adapter a = make_adapter(Platform::legged);
  a.on_brain_decision(decision(Platform::legged, Skill::walk, {pixel_of(o, {3, 0, 0.12})}), o);
  CHECK(a.state().mode == Mode::moving);
  CHECK(a.state().waypoint == 0);

  Adapter b = make_adapter(Platform::legged);
  b.on_brain_decision(decision(Platform::legged, Skill::sit, {}), o);
  CHECK(b.state().mode == Mode::executing_skill);
  CHECK(b.state().skill == Skill::sit);

  Adapter c = make_adapter(Platform::legged);
  c.on_brain_decision(decision(Platform::legged, Skill::walk, {}), o);
  CHECK(c.state().mode == Mode::failed);
  CHECK(c.state().cause == FailCause::invalid_decision);

  Adapter d = make_adapter(Platform::legged);
  CHECK_THROWS_AS(d.on_brain_decision(decision(Platform::legged, Skill::pull, {}), o), DomainError);
  CHECK(d.state().mode == Mode::await_brain);
  CHECK_THROWS_AS(d.on_brain_decision(decision(Platform::arm, Skill::grasp, {}), o), DomainError);
  CHECK_THROWS_AS(d.on_brain_decision(decision(Platform::legged, Skill::walk, {{-5, 10}}), o), DomainError);

  Simulator arm(ArmWorld{});
  const Observation ao = arm.observe(0);
  Adapter e = make_adapter(Platform::arm);
  CHECK_THROWS_AS(e.on_brain_decision(decision(Platform::arm, Skill::grasp, {{50, 50}}), ao), DomainError);
  CHECK(e.state().mode == Mode::await_brain);
}

TEST_CASE("far target: forward command, no event") {
  LeggedWorld w;
  w.objects.push_back(ball_at(1.3, 0));  // camera 1 m from the ball centre
  Simulator sim(w);
  Adapter a = make_adapter(Platform::legged);
  const Observation o = sim.observe(0);
  a.on_brain_decision(decision(Platform::legged, Skill::walk, {pixel_of(o, {1.3, 0, 0.12})}), o);
  const TickOutput out = a.control_tick(sim.observe(1));
  CHECK_FALSE(out.event);
  const auto* v = std::get_if<VelocityCommand>(&out.command);
  REQUIRE(v);
  CHECK(v->vx > 0.0);
  CHECK(a.state().mode == Mode::moving);
  CHECK_THROWS_AS(a.control_tick(sim.observe(1)), OrderingError);
}

TEST_CASE("occlusion takeover fires at exactly tick K") {
  for (int k : {1, 5, 10}) {
    LeggedWorld w;
    w.objects.push_back(ball_at(3, 0));
    Simulator sim(w);
    Adapter a = make_adapter(Platform::legged, k);
    const Observation o = sim.observe(0);
    a.on_brain_decision(decision(Platform::legged, Skill::walk, {pixel_of(o, {3, 0, 0.12})}), o);
    // a wall drops in front of the camera
    WorldObject wall;
    wall.id = 9;
    wall.cls = ObjectClass::obstacle;
    wall.center = {1.0, 0, 0.5};
    wall.half_extents = {0.05, 2.0, 0.5};
    sim.legged()->objects.push_back(wall);
    int fired = -1, events = 0;
    for (int t = 1; t <= 15; ++t) {
      if (a.state().mode != Mode::moving) break;
      const TickOutput out = a.control_tick(sim.observe(t));
      if (out.event) {
        ++events;
        fired = t;
        CHECK(out.event->cause == TakeoverCause::keypoints_lost);
        CHECK(out.event->tick == t);
      }
    }
    CHECK(fired == k);
    CHECK(events == 1);
    CHECK(a.state().mode == Mode::await_brain);
  }
}

TEST_CASE("reaching the last waypoint starts the skill") {
  LeggedWorld w;
  WorldObject crate;
  crate.id = 1;
  crate.cls = ObjectClass::container;
  crate.half_extents = {0.25, 0.25, 0.2};
  crate.center = {legged::kCameraForward + 0.2 + 0.25, 0, 0.2};  // face 0.2 m from the camera
  w.objects.push_back(crate);
  Simulator sim(w);
  Adapter a = make_adapter(Platform::legged);
  const Observation o = sim.observe(0, true);
  a.on_brain_decision(decision(Platform::legged, Skill::dump, {pixel_of(o, {0.5, 0, 0.3})}), o);
  TickOutput out = a.control_tick(sim.observe(1, true));
  CHECK_FALSE(out.event);
  CHECK(a.state().mode == Mode::executing_skill);
  CHECK(a.state().skill == Skill::dump);
  const int n = a.config().duration(Skill::dump);
  for (int t = 2; t < n + 1; ++t) {
    out = a.control_tick(sim.observe(t, false));
    CHECK_FALSE(out.event);
  }
  out = a.control_tick(sim.observe(n + 1, false));
  REQUIRE(out.event);
  CHECK(out.event->cause == TakeoverCause::skill_complete);
  CHECK(out.completed_skill == Skill::dump);
  CHECK(a.state().mode == Mode::await_brain);
}

TEST_CASE("walk decisions end with SubtaskDone after every waypoint") {
  LeggedWorld w;
  WorldObject crate;
  crate.id = 1;
  crate.cls = ObjectClass::container;
  crate.half_extents = {0.25, 0.25, 0.2};
  crate.center = {0.75, 0, 0.2};
  w.objects.push_back(crate);
  Simulator sim(w);
  Adapter a = make_adapter(Platform::legged);
  const Observation o = sim.observe(0, true);
  const Pixel near = pixel_of(o, {0.5, 0, 0.3});
  a.on_brain_decision(decision(Platform::legged, Skill::walk, {near, {near.u + 2, near.v}}), o);
  TickOutput out = a.control_tick(sim.observe(1, true));
  CHECK_FALSE(out.event);
  CHECK(a.state().waypoint == 1);
  out = a.control_tick(sim.observe(2, true));
  REQUIRE(out.event);
  CHECK(out.event->cause == TakeoverCause::subtask_done);
}

TEST_CASE("arm: move, settle, grasp") {
  ArmWorld w;
  WorldObject carrot;
  carrot.id = 1;
  carrot.cls = ObjectClass::carrot;
  carrot.half_extents = {0.07, 0.015, 0.015};
  carrot.center = {0.0, 0.2, 0.015};
  carrot.place = {PlaceKind::table, -1};
  w.objects.push_back(carrot);
  Simulator sim(w);
  Adapter a = make_adapter(Platform::arm);
  const Observation o = sim.observe(0);
  const Pixel p1 = pixel_of(o, {0, 0.19, 0.03}), p2 = pixel_of(o, {0, 0.21, 0.03});
  a.on_brain_decision(decision(Platform::arm, Skill::grasp, {p1, p2}), o);
  CHECK(a.state().mode == Mode::moving);
  std::int64_t t = 1;
  std::optional<GraspPose> target;
  for (; t < 40 && a.state().mode == Mode::moving; ++t) {
    const TickOutput out = a.control_tick(sim.observe(t));
    if (auto* g = std::get_if<GraspPose>(&out.command)) target = *g;
    sim.step(out.command);
  }
  REQUIRE(target);
  CHECK(target->position.x == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(target->position.y == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(target->yaw == doctest::Approx(std::numbers::pi / 2));
  CHECK(a.state().mode == Mode::executing_skill);
  std::optional<Skill> done;
  for (; t < 80 && !done; ++t) {
    const TickOutput out = a.control_tick(sim.observe(t));
    sim.step(out.command);
    if (out.completed_skill) {
      done = out.completed_skill;
      sim.apply_skill(*done);
    }
  }
  CHECK(done == Skill::grasp);
  CHECK(sim.arm()->held == 1);
}
