#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "brainloop/simulator.hpp"

namespace brainloop {

namespace {

const Eigen::Vector3d kHumanHalf{0.15, 0.22, 0.6};

Rgb gesture_color(Gesture g) {
  switch (g) {
    case Gesture::come: return {40, 220, 40};
    case Gesture::sit: return {230, 40, 220};
    case Gesture::shake: return {250, 250, 40};
    case Gesture::touch: return {40, 230, 230};
    case Gesture::none: break;
  }
  return {250, 250, 250};
}

Box human_body(const Human& h) {
  return Box{{h.pose.x, h.pose.y, kHumanHalf.z()}, kHumanHalf, h.pose.yaw};
}

bool solid(const WorldObject& o) {
  return o.place.kind == PlaceKind::ground &&
         (o.cls == ObjectClass::obstacle || o.cls == ObjectClass::container);
}

bool rendered(const WorldObject& o) { return o.place.kind == PlaceKind::ground; }

void advance(WorldObject& o, double dt) {
  if (!o.motion || o.motion->waypoints.size() < 2) return;
  Motion& m = *o.motion;
  double budget = m.speed * dt;
  // Loops over the waypoints; two waypoints give a back-and-forth track.
  for (size_t guard = 0; budget > 0.0 && guard < 2 * m.waypoints.size(); ++guard) {
    const Eigen::Vector2d pos = o.center.head<2>();
    const Eigen::Vector2d delta = m.waypoints[m.next] - pos;
    const double d = delta.norm();
    if (d > budget) {
      o.center.head<2>() = pos + delta * (budget / d);
      return;
    }
    o.center.head<2>() = m.waypoints[m.next];
    budget -= d;
    m.next = (m.next + 1) % m.waypoints.size();
  }
}

Eigen::Vector2d front_point(const Pose2& p) {
  return {p.x + legged::kCameraForward * std::cos(p.yaw), p.y + legged::kCameraForward * std::sin(p.yaw)};
}

}  // namespace

const WorldObject* LeggedWorld::object(int id) const {
  for (const auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

WorldObject* LeggedWorld::object(int id) {
  for (auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

const Human* LeggedWorld::human(int id) const {
  for (const auto& h : humans) {
    if (h.id == id) return &h;
  }
  return nullptr;
}

RigidTransform legged_camera_mount() {
  RigidTransform t;
  t.rotation << 0, 0, 1, -1, 0, 0, 0, -1, 0;
  t.translation = {legged::kCameraForward, 0.0, legged::kCameraHeight};
  return t;
}

CameraModel legged_camera(const Pose2& robot) {
  CameraModel cam;
  cam.fx = cam.fy = legged::kFocal;
  cam.width = legged::kImageWidth;
  cam.height = legged::kImageHeight;
  cam.cx = (cam.width - 1) / 2.0;
  cam.cy = (cam.height - 1) / 2.0;
  cam.extrinsics = RigidTransform::rot_z(robot.yaw, {robot.x, robot.y, 0.0}).compose(legged_camera_mount());
  return cam;
}

Scene legged_scene(const LeggedWorld& w) {
  Scene s;
  if (w.ground) s.add({0, 0, ObjectClass::ground, class_color(ObjectClass::ground), Plane{0.0}});
  for (const auto& o : w.objects) {
    if (!rendered(o)) continue;
    s.add({o.id * 8, o.id, o.cls, class_color(o.cls), o.shape_value()});
  }
  for (const auto& h : w.humans) {
    s.add({h.id * 8, h.id, ObjectClass::human, class_color(ObjectClass::human), human_body(h)});
    // Gesture marker on the chest, facing along the human's heading.
    const double c = std::cos(h.pose.yaw), sn = std::sin(h.pose.yaw);
    const double off = kHumanHalf.x() + 0.02;
    Box marker{{h.pose.x + off * c, h.pose.y + off * sn, 0.9}, {0.02, 0.12, 0.12}, h.pose.yaw};
    s.add({h.id * 8 + 1, h.id, ObjectClass::human_marker, gesture_color(h.gesture), marker});
  }
  return s;
}

bool robot_collides(const LeggedWorld& w, const Pose2& pose) {
  const double r = legged::kRobotRadius;
  if (std::abs(pose.x) > legged::kArenaHalf - r || std::abs(pose.y) > legged::kArenaHalf - r) return true;
  for (const auto& o : w.objects) {
    if (solid(o) && footprint_distance(o.shape_value(), pose.x, pose.y) < r) return true;
  }
  for (const auto& h : w.humans) {
    if (footprint_distance(human_body(h), pose.x, pose.y) < r) return true;
  }
  return false;
}

double robot_gap(const LeggedWorld& w, int target_id) {
  const Pose2& p = w.robot.pose;
  double d = std::numeric_limits<double>::infinity();
  if (const auto* o = w.object(target_id)) {
    d = footprint_distance(o->shape_value(), p.x, p.y);
  } else if (const auto* h = w.human(target_id)) {
    d = footprint_distance(human_body(*h), p.x, p.y);
  }
  return std::max(0.0, d - legged::kRobotRadius);
}

void step_legged(LeggedWorld& w, const VelocityCommand& cmd, double dt) {
  Pose2& p = w.robot.pose;
  const double c = std::cos(p.yaw), s = std::sin(p.yaw);
  p.x += (cmd.vx * c - cmd.vy * s) * dt;
  p.y += (cmd.vx * s + cmd.vy * c) * dt;
  p.yaw += cmd.vyaw * dt;
  for (auto& o : w.objects) advance(o, dt);
  if (robot_collides(w, p)) w.collided = true;
}

SkillOutcome apply_legged_skill(LeggedWorld& w, Skill skill) {
  LeggedRobot& r = w.robot;
  switch (skill) {
    case Skill::walk: return {};
    case Skill::turn_left:
    case Skill::turn_right:
      r.pose.yaw += (skill == Skill::turn_left ? 0.5 : -0.5) * std::numbers::pi;
      return {};
    case Skill::jump: {
      r.pose.x += legged::kJumpDistance * std::cos(r.pose.yaw);
      r.pose.y += legged::kJumpDistance * std::sin(r.pose.yaw);
      if (robot_collides(w, r.pose)) w.collided = true;
      return {};
    }
    case Skill::dump: {
      if (r.basket.empty()) return {false, "basket is empty"};
      const Eigen::Vector2d front = front_point(r.pose);
      const WorldObject* best = nullptr;
      double best_d = legged::kDumpRadius;
      for (const auto& o : w.objects) {
        if (o.cls != ObjectClass::container || o.place.kind != PlaceKind::ground) continue;
        const Eigen::Vector2d rel = o.center.head<2>() - Eigen::Vector2d(r.pose.x, r.pose.y);
        const double bearing = wrap_angle(std::atan2(rel.y(), rel.x()) - r.pose.yaw);
        if (std::abs(bearing) > std::numbers::pi / 3.0) continue;
        const double d = footprint_distance(o.shape_value(), front.x(), front.y());
        if (d <= best_d) {
          best_d = d;
          best = &o;
        }
      }
      for (int id : r.basket) {
        WorldObject* item = w.object(id);
        if (!item) continue;
        if (best) {
          item->place = {PlaceKind::container, best->id};
          item->center = best->center;
        } else {
          item->place = {PlaceKind::ground, -1};
          item->center = {front.x(), front.y(), item->half_extents.z()};
        }
      }
      r.basket.clear();
      if (!best) return {false, "no container in reach; items fell on the ground"};
      return {};
    }
    default:
      r.posture = std::string(skill_name(skill));
      return {};
  }
}

}  // namespace brainloop
