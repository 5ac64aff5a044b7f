#include <algorithm>
#include <cmath>
#include <numbers>

#include "brainloop/simulator.hpp"

namespace brainloop {

namespace {

constexpr int kBoxOwner = 100;
constexpr int kCabinetOwner = 110;
constexpr int kTrayOwner = 120;
constexpr int kHandleOwner = 130;
constexpr double kWall = 0.01;

void add_box(Scene& s, int id, int owner, ObjectClass cls, Eigen::Vector3d c, Eigen::Vector3d h) {
  s.add({id, owner, cls, class_color(cls), Box{c, h, 0.0}});
}

bool in_tray_footprint(double yf, double x, double y) {
  return std::abs(x - arm::kTrayCenterX) <= arm::kTrayHalfWidth && y >= yf && y <= yf + arm::kTrayLength;
}

// Direction the jaws close along for a fixed object, or nullopt when any
// direction works.
std::optional<double> closing_axis(const WorldObject& o) {
  if (o.shape == ShapeKind::sphere) return std::nullopt;
  const bool long_x = o.half_extents.x() >= o.half_extents.y();
  return canonical_grasp_yaw(o.yaw + (long_x ? std::numbers::pi / 2.0 : 0.0));
}

double axis_difference(double a, double b) {
  const double d = std::abs(canonical_grasp_yaw(a) - canonical_grasp_yaw(b));
  return std::min(d, std::numbers::pi - d);
}

}  // namespace

const WorldObject* ArmWorld::object(int id) const {
  for (const auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

WorldObject* ArmWorld::object(int id) {
  for (auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

CameraModel arm_camera() {
  CameraModel cam;
  cam.fx = cam.fy = arm::kFocal;
  cam.width = arm::kImageWidth;
  cam.height = arm::kImageHeight;
  cam.cx = (cam.width - 1) / 2.0;
  cam.cy = (cam.height - 1) / 2.0;
  cam.extrinsics.rotation << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  cam.extrinsics.translation = {0.0, arm::kCameraY, arm::kCameraHeight};
  return cam;
}

double tray_front_y(double fraction) { return arm::kCabinetFrontY - fraction * arm::kTrayLength; }

Point3 handle_center(const ArmWorld& w) {
  return {arm::kTrayCenterX, tray_front_y(w.drawer) - 0.025, 0.03};
}

bool inside_box(const ArmWorld& w, const Eigen::Vector3d& p) {
  return std::abs(p.x() - w.box_center.x()) < arm::kBoxInnerHalf &&
         std::abs(p.y() - w.box_center.y()) < arm::kBoxInnerHalf && p.z() >= 0.0 &&
         p.z() < arm::kBoxWallHeight;
}

bool inside_drawer(const ArmWorld& w, const Eigen::Vector3d& p) {
  return in_tray_footprint(tray_front_y(w.drawer), p.x(), p.y()) && p.z() >= 0.0 && p.z() < 0.06;
}

double support_height(const ArmWorld& w, double x, double y, Placement* place) {
  Placement pl{PlaceKind::table, -1};
  double h = 0.0;
  if (std::abs(x - w.box_center.x()) < arm::kBoxInnerHalf && std::abs(y - w.box_center.y()) < arm::kBoxInnerHalf) {
    pl = {PlaceKind::container, kBoxOwner};
  } else if (in_tray_footprint(tray_front_y(w.drawer), x, y)) {
    pl = {PlaceKind::drawer, -1};
    h = arm::kTrayFloor;
  }
  if (place) *place = pl;
  return h;
}

Scene arm_scene(const ArmWorld& w) {
  Scene s;
  s.add({0, 0, ObjectClass::table, class_color(ObjectClass::table), Plane{0.0}});

  const double a = arm::kBoxInnerHalf, hh = arm::kBoxWallHeight / 2.0;
  const Eigen::Vector3d bc(w.box_center.x(), w.box_center.y(), hh);
  add_box(s, 100, kBoxOwner, ObjectClass::container, bc + Eigen::Vector3d(a + kWall / 2, 0, 0), {kWall / 2, a + kWall, hh});
  add_box(s, 101, kBoxOwner, ObjectClass::container, bc - Eigen::Vector3d(a + kWall / 2, 0, 0), {kWall / 2, a + kWall, hh});
  add_box(s, 102, kBoxOwner, ObjectClass::container, bc + Eigen::Vector3d(0, a + kWall / 2, 0), {a, kWall / 2, hh});
  add_box(s, 103, kBoxOwner, ObjectClass::container, bc - Eigen::Vector3d(0, a + kWall / 2, 0), {a, kWall / 2, hh});

  const double cy = (arm::kCabinetFrontY + arm::kCabinetBackY) / 2.0;
  const double chy = (arm::kCabinetBackY - arm::kCabinetFrontY) / 2.0;
  const double chx = arm::kTrayHalfWidth + 0.02;
  const double top = arm::kCabinetHeight;
  add_box(s, 110, kCabinetOwner, ObjectClass::cabinet, {arm::kTrayCenterX, cy, top - kWall / 2}, {chx, chy, kWall / 2});
  for (int side : {-1, 1}) {
    add_box(s, side < 0 ? 111 : 112, kCabinetOwner, ObjectClass::cabinet,
            {arm::kTrayCenterX + side * (chx - kWall / 2), cy, (top - kWall) / 2}, {kWall / 2, chy, (top - kWall) / 2});
  }

  const double yf = tray_front_y(w.drawer);
  add_box(s, 120, kTrayOwner, ObjectClass::drawer, {arm::kTrayCenterX, yf + arm::kTrayLength / 2, arm::kTrayFloor / 2},
          {arm::kTrayHalfWidth, arm::kTrayLength / 2, arm::kTrayFloor / 2});
  add_box(s, 121, kTrayOwner, ObjectClass::drawer, {arm::kTrayCenterX, yf + kWall / 2, 0.03},
          {arm::kTrayHalfWidth, kWall / 2, 0.03});
  const Point3 hc = handle_center(w);
  add_box(s, 130, kHandleOwner, ObjectClass::handle, hc.vec(), {0.05, 0.015, 0.01});

  for (const auto& o : w.objects) s.add({o.id * 8, o.id, o.cls, class_color(o.cls), o.shape_value()});
  return s;
}

void step_arm(ArmWorld& w, const std::optional<GraspPose>& target) {
  if (target && (!w.motion_target || !(*w.motion_target == *target))) {
    w.motion_target = target;
    w.motion_ticks_left = std::max(1, w.motion_ticks);
  }
  if (w.motion_ticks_left > 0 && --w.motion_ticks_left == 0) {
    w.ee = w.motion_target->position;
    w.ee_yaw = w.motion_target->yaw;
    if (w.held) {
      if (auto* o = w.object(*w.held)) o->center = w.ee.vec() + w.held_offset;
    }
  }
}

SkillOutcome apply_arm_skill(ArmWorld& w, Skill skill) {
  const Eigen::Vector3d ee = w.ee.vec();
  switch (skill) {
    case Skill::grasp: {
      if (w.held) return {false, "already holding an object"};
      WorldObject* best = nullptr;
      double best_d = arm::kGraspTolerance;
      for (auto& o : w.objects) {
        const double d = (o.center - ee).norm();
        if (d > best_d) continue;
        if (auto axis = closing_axis(o); axis && axis_difference(*axis, w.ee_yaw) > arm::kGraspYawTolerance) continue;
        best_d = d;
        best = &o;
      }
      if (!best) return {false, "nothing graspable within tolerance"};
      w.gripper = GripperState::closed;
      w.held = best->id;
      w.held_offset = best->center - ee;
      best->place = {PlaceKind::gripper, -1};
      return {};
    }
    case Skill::release: {
      w.gripper = GripperState::open;
      if (!w.held) return {false, "nothing held"};
      WorldObject* o = w.object(*w.held);
      w.held.reset();
      if (!o) return {false, "held object vanished"};
      Placement pl;
      const double h = support_height(w, o->center.x(), o->center.y(), &pl);
      o->center.z() = h + o->half_extents.z();
      if (o->shape == ShapeKind::sphere) o->center.z() = h + o->radius();
      o->place = pl;
      return {};
    }
    case Skill::pull: {
      if ((handle_center(w).vec() - ee).norm() > arm::kGraspTolerance) return {false, "not hooked on the handle"};
      const double dy = tray_front_y(1.0) - tray_front_y(w.drawer);
      w.drawer = 1.0;
      for (auto& o : w.objects) {
        if (o.place.kind == PlaceKind::drawer) o.center.y() += dy;
      }
      w.ee.y += dy;
      return {};
    }
    default:
      return {false, "skill has no effect on the arm"};
  }
}

}  // namespace brainloop
