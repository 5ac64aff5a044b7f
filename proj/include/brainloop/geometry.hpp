#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace brainloop {

// Sub-pixel image coordinate. Pixel centres sit on integer coordinates.
struct Pixel {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

// Metric 3D point. The frame (camera / body / world) is stated at each use.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Eigen::Vector3d vec() const { return {x, y, z}; }
  static Point3 from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

  friend bool operator==(const Point3&, const Point3&) = default;
};

double distance(const Point3& a, const Point3& b);

// Rigid transform mapping points of a child frame into a parent frame.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Point3 apply(const Point3& p) const;
  RigidTransform inverse() const;
  // (*this) * other: first other, then this.
  RigidTransform compose(const RigidTransform& other) const;

  static RigidTransform rot_z(double yaw, const Eigen::Vector3d& t = Eigen::Vector3d::Zero());
};

// Throws DomainError unless the rotation is orthonormal with det +1 (to 1e-9).
void check_rotation(const Eigen::Matrix3d& r);

// Pinhole camera. Camera frame: x right, y down, z along the optical axis.
struct CameraModel {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
  RigidTransform extrinsics;  // camera -> world

  void validate() const;
  bool contains(const Pixel& p) const;
};

// Per-pixel depth in metres; 0 marks an invalid sample (hole).
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  DepthImage() = default;
  DepthImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0.0) {}

  double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
};

Point3 unproject(const Pixel& pixel, double depth, const CameraModel& cam);
Pixel project(const Point3& point_cam, const CameraModel& cam);
Point3 camera_to_world(const Point3& point_cam, const CameraModel& cam);
Point3 world_to_camera(const Point3& point_world, const CameraModel& cam);

// Nearest-pixel depth lookup. Falls back to the closest valid sample within
// `fill_radius` pixels (ties broken in row-major order). Throws
// DepthUnavailable if the pixel is off-image or no valid sample is found.
double sample_depth(const DepthImage& depth, const Pixel& pixel, int fill_radius = 3);

struct VelocityCommand {
  double vx = 0.0;    // m/s, forward
  double vy = 0.0;    // m/s, left
  double vyaw = 0.0;  // rad/s

  friend bool operator==(const VelocityCommand&, const VelocityCommand&) = default;
};

struct VelocityLimits {
  double gain = 0.5;      // 1/s
  double v_max = 1.0;     // m/s
  double yaw_max = 1.0;   // rad/s
  double eps_v = 1e-6;    // below this |vx| the heading constraint is undefined
};

// Proportional command towards a body-frame target (x forward, y left).
//
// The lateral/forward ratio and the yaw rate are tied by
// tan(vyaw) = vy / vx. When that relation cannot be honoured inside the
// limits (target abeam, behind, or with a bearing larger than yaw_max) the
// robot turns in place towards the target instead.
VelocityCommand velocity_command(const Point3& target_body, const VelocityLimits& limits);

enum class GraspMode { grasp, hook };

struct GraspPose {
  Point3 position;  // world frame
  double yaw = 0.0;  // [0, pi)
  GraspMode mode = GraspMode::grasp;

  friend bool operator==(const GraspPose&, const GraspPose&) = default;
};

// Folds an angle into [0, pi); a parallel-jaw gripper is symmetric under a
// half turn.
double canonical_grasp_yaw(double angle);

// Wraps to (-pi, pi].
double wrap_angle(double angle);

// Top-down grasp from two antipodal contact pixels. Position comes from the
// depth at the pixel midpoint; yaw from the world-frame direction between
// the two contacts lifted onto the plane at that depth.
GraspPose grasp_from_antipodal(const Pixel& p1, const Pixel& p2, const DepthImage& depth,
                               const CameraModel& cam, GraspMode mode, int fill_radius = 3);

}  // namespace brainloop
