#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "brainloop/decision.hpp"
#include "brainloop/geometry.hpp"
#include "brainloop/scene.hpp"
#include "brainloop/task.hpp"

namespace brainloop {

inline constexpr double kControlRateHz = 15.0;
inline constexpr double kControlDt = 1.0 / kControlRateHz;

// What the adapter sends to the robot on one tick.
using ControlCommand = std::variant<std::monostate, VelocityCommand, GraspPose>;

// Where a world object currently is. Exactly one place at a time.
enum class PlaceKind { ground, table, basket, container, gripper, drawer };
std::string_view to_string(PlaceKind k);

struct Placement {
  PlaceKind kind = PlaceKind::ground;
  int container_id = -1;  // for PlaceKind::container

  friend bool operator==(const Placement&, const Placement&) = default;
};

enum class ShapeKind { sphere, box };

// Constant-velocity loop over ground waypoints.
struct Motion {
  std::vector<Eigen::Vector2d> waypoints;
  double speed = 0.0;
  size_t next = 1;
};

struct WorldObject {
  int id = 0;
  ObjectClass cls = ObjectClass::obstacle;
  ShapeKind shape = ShapeKind::box;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_extents = Eigen::Vector3d::Zero();  // sphere: x holds the radius
  double yaw = 0.0;
  Placement place;
  std::optional<Motion> motion;

  double radius() const { return half_extents.x(); }
  Shape shape_value() const;
};

struct SkillOutcome {
  bool ok = true;
  std::string note;
};

// ---------------------------------------------------------------------------
// Legged platform

namespace legged {
inline constexpr double kRobotRadius = 0.3;
inline constexpr double kCameraForward = 0.3;
inline constexpr double kCameraHeight = 0.3;
inline constexpr int kImageWidth = 160;
inline constexpr int kImageHeight = 120;
inline constexpr double kFocal = 70.0;
inline constexpr double kDumpRadius = 0.5;
inline constexpr double kJumpDistance = 0.5;
inline constexpr double kArenaHalf = 8.0;
}  // namespace legged

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

struct LeggedRobot {
  Pose2 pose;
  std::string posture = "stand";
  std::vector<int> basket;  // object ids carried
};

struct Human {
  int id = 0;
  Pose2 pose;
  Gesture gesture = Gesture::none;
};

struct LeggedWorld {
  LeggedRobot robot;
  std::vector<WorldObject> objects;  // balls, obstacles, containers, basket items
  std::vector<Human> humans;
  bool ground = true;
  int target_id = -1;  // ball, human or container the task is about
  bool collided = false;

  const WorldObject* object(int id) const;
  WorldObject* object(int id);
  const Human* human(int id) const;
};

// Camera -> body mount of the ego camera.
RigidTransform legged_camera_mount();
CameraModel legged_camera(const Pose2& robot);
Scene legged_scene(const LeggedWorld& w);

// Kinematic integration of one body-frame velocity command; sets
// w.collided when the footprint penetrates anything solid.
void step_legged(LeggedWorld& w, const VelocityCommand& cmd, double dt = kControlDt);
SkillOutcome apply_legged_skill(LeggedWorld& w, Skill skill);
// Planar gap between the robot footprint and an object's / human's footprint.
double robot_gap(const LeggedWorld& w, int target_id);
bool robot_collides(const LeggedWorld& w, const Pose2& pose);

// ---------------------------------------------------------------------------
// Arm platform

namespace arm {
inline constexpr int kImageWidth = 160;
inline constexpr int kImageHeight = 120;
inline constexpr double kFocal = 150.0;
inline constexpr double kCameraHeight = 1.0;
inline constexpr double kCameraY = 0.4;
inline constexpr double kGraspTolerance = 0.03;
inline constexpr double kGraspYawTolerance = 25.0 * 3.14159265358979323846 / 180.0;
inline constexpr double kBoxInnerHalf = 0.11;
inline constexpr double kBoxWallHeight = 0.08;
inline constexpr double kTrayLength = 0.24;
inline constexpr double kCabinetFrontY = 0.55;
inline constexpr double kCabinetBackY = 0.80;
inline constexpr double kTrayCenterX = -0.30;
inline constexpr double kTrayHalfWidth = 0.13;
inline constexpr double kTrayFloor = 0.01;
inline constexpr double kCabinetHeight = 0.12;
}  // namespace arm

enum class GripperState { open, closed };

struct ArmWorld {
  Point3 ee{0.0, 0.1, 0.4};
  double ee_yaw = 0.0;
  GripperState gripper = GripperState::open;
  std::optional<int> held;
  Eigen::Vector3d held_offset = Eigen::Vector3d::Zero();  // object centre - ee
  double drawer = 0.5;                                    // opening fraction
  Eigen::Vector2d box_center{0.28, 0.45};                 // container
  std::vector<WorldObject> objects;                       // fruit and vegetables
  int target_id = -1;
  std::optional<GraspPose> motion_target;
  int motion_ticks_left = 0;
  int motion_ticks = 15;

  const WorldObject* object(int id) const;
  WorldObject* object(int id);
};

CameraModel arm_camera();
Scene arm_scene(const ArmWorld& w);
double tray_front_y(double fraction);
Point3 handle_center(const ArmWorld& w);
bool inside_box(const ArmWorld& w, const Eigen::Vector3d& p);
bool inside_drawer(const ArmWorld& w, const Eigen::Vector3d& p);
// Top surface height at (x, y) an object released there comes to rest on.
double support_height(const ArmWorld& w, double x, double y, Placement* place = nullptr);

// Teleport-style motion: a new target is reached after motion_ticks ticks.
void step_arm(ArmWorld& w, const std::optional<GraspPose>& target);
SkillOutcome apply_arm_skill(ArmWorld& w, Skill skill);

// ---------------------------------------------------------------------------

// A running world of either platform.
class Simulator {
 public:
  explicit Simulator(LeggedWorld w, RenderOptions opts = {});
  explicit Simulator(ArmWorld w, RenderOptions opts = {});

  Platform platform() const;
  // Scene snapshot and camera are always filled; rgb/depth only if `render`.
  Observation observe(std::int64_t frame_id, bool render = true) const;
  void step(const ControlCommand& cmd);
  SkillOutcome apply_skill(Skill skill);
  bool collided() const;
  std::uint64_t state_hash() const;

  const LeggedWorld* legged() const { return std::get_if<LeggedWorld>(&world_); }
  const ArmWorld* arm() const { return std::get_if<ArmWorld>(&world_); }
  LeggedWorld* legged() { return std::get_if<LeggedWorld>(&world_); }
  ArmWorld* arm() { return std::get_if<ArmWorld>(&world_); }

  // [x, y, yaw] for the legged robot, [x, y, z] of the end effector for the arm.
  std::vector<double> pose_summary() const;

 private:
  std::variant<LeggedWorld, ArmWorld> world_;
  RenderOptions opts_;
};

// ---------------------------------------------------------------------------
// Scene layouts

struct SceneRequest {
  TaskId task;
  std::uint64_t seed = 0;
  int trial_index = 0;
};

Simulator generate_scene(const SceneRequest& req);

// JSON layout files; see README for the schema.
nlohmann::json scene_to_json(const Simulator& sim);
Simulator scene_from_json(const nlohmann::json& j);

}  // namespace brainloop
