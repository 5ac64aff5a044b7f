#include "brainloop/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "brainloop/errors.hpp"

namespace brainloop {

namespace {

bool finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

}  // namespace

double distance(const Point3& a, const Point3& b) { return (a.vec() - b.vec()).norm(); }

Point3 RigidTransform::apply(const Point3& p) const {
  return Point3::from(rotation * p.vec() + translation);
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

RigidTransform RigidTransform::compose(const RigidTransform& other) const {
  RigidTransform out;
  out.rotation = rotation * other.rotation;
  out.translation = rotation * other.translation + translation;
  return out;
}

RigidTransform RigidTransform::rot_z(double yaw, const Eigen::Vector3d& t) {
  RigidTransform out;
  out.rotation = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  out.translation = t;
  return out;
}

void check_rotation(const Eigen::Matrix3d& r) {
  if (!r.allFinite()) throw DomainError("rotation has non-finite entries");
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho > 1e-9) throw DomainError("rotation is not orthonormal");
  if (std::abs(r.determinant() - 1.0) > 1e-9) throw DomainError("rotation determinant is not +1");
}

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw DomainError("focal lengths must be positive");
  if (width <= 0 || height <= 0) throw DomainError("image size must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw DomainError("principal point outside the image");
  }
  check_rotation(extrinsics.rotation);
  if (!extrinsics.translation.allFinite()) throw DomainError("translation has non-finite entries");
}

bool CameraModel::contains(const Pixel& p) const {
  return p.u >= 0.0 && p.v >= 0.0 && p.u <= width - 1 && p.v <= height - 1;
}

Point3 unproject(const Pixel& pixel, double depth, const CameraModel& cam) {
  if (!std::isfinite(depth) || depth <= 0.0) throw DomainError("depth must be positive and finite");
  if (!std::isfinite(pixel.u) || !std::isfinite(pixel.v)) throw DomainError("pixel must be finite");
  return {(pixel.u - cam.cx) * depth / cam.fx, (pixel.v - cam.cy) * depth / cam.fy, depth};
}

Pixel project(const Point3& p, const CameraModel& cam) {
  if (!(p.z > 0.0)) throw BehindCamera();
  return {cam.fx * p.x / p.z + cam.cx, cam.fy * p.y / p.z + cam.cy};
}

Point3 camera_to_world(const Point3& point_cam, const CameraModel& cam) {
  return cam.extrinsics.apply(point_cam);
}

Point3 world_to_camera(const Point3& point_world, const CameraModel& cam) {
  return Point3::from(cam.extrinsics.rotation.transpose() *
                      (point_world.vec() - cam.extrinsics.translation));
}

double sample_depth(const DepthImage& depth, const Pixel& pixel, int fill_radius) {
  if (!std::isfinite(pixel.u) || !std::isfinite(pixel.v)) {
    throw DepthUnavailable("non-finite pixel");
  }
  const long ix = std::lround(pixel.u);
  const long iy = std::lround(pixel.v);
  if (ix < 0 || iy < 0 || ix >= depth.width || iy >= depth.height) {
    throw DepthUnavailable("pixel outside the depth image");
  }
  auto valid = [&](long x, long y) {
    if (x < 0 || y < 0 || x >= depth.width || y >= depth.height) return false;
    const double d = depth.at(static_cast<int>(x), static_cast<int>(y));
    return std::isfinite(d) && d > 0.0;
  };
  if (valid(ix, iy)) return depth.at(static_cast<int>(ix), static_cast<int>(iy));

  long best_d2 = static_cast<long>(fill_radius) * fill_radius + 1;
  double best = 0.0;
  for (long dy = -fill_radius; dy <= fill_radius; ++dy) {
    for (long dx = -fill_radius; dx <= fill_radius; ++dx) {
      const long d2 = dx * dx + dy * dy;
      if (d2 < best_d2 && valid(ix + dx, iy + dy)) {
        best_d2 = d2;
        best = depth.at(static_cast<int>(ix + dx), static_cast<int>(iy + dy));
      }
    }
  }
  if (best <= 0.0) throw DepthUnavailable("no valid depth near pixel");
  return best;
}

VelocityCommand velocity_command(const Point3& target, const VelocityLimits& limits) {
  if (!finite(target)) throw DomainError("non-finite velocity target");
  const double vx = std::clamp(limits.gain * target.x, -limits.v_max, limits.v_max);
  const double vy = std::clamp(limits.gain * target.y, -limits.v_max, limits.v_max);

  auto turn_in_place = [&](double direction) {
    return VelocityCommand{0.0, 0.0, direction >= 0.0 ? limits.yaw_max : -limits.yaw_max};
  };

  if (std::abs(vx) <= limits.eps_v) {
    if (std::abs(vy) <= limits.eps_v) return {};
    return turn_in_place(vy);
  }
  const double heading = std::atan2(vy, vx);
  if (std::abs(heading) > limits.yaw_max) return turn_in_place(heading);
  return {vx, vy, heading};
}

double wrap_angle(double angle) {
  double a = std::remainder(angle, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

double canonical_grasp_yaw(double angle) {
  double a = std::fmod(angle, std::numbers::pi);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a < 0.0 ? 0.0 : a;
}

GraspPose grasp_from_antipodal(const Pixel& p1, const Pixel& p2, const DepthImage& depth,
                               const CameraModel& cam, GraspMode mode, int fill_radius) {
  if (p1 == p2) throw DomainError("antipodal points coincide");
  const Pixel mid{(p1.u + p2.u) / 2.0, (p1.v + p2.v) / 2.0};
  if (!cam.contains(mid)) throw DomainError("grasp midpoint outside the image");
  const double d = sample_depth(depth, mid, fill_radius);

  GraspPose pose;
  pose.mode = mode;
  pose.position = camera_to_world(unproject(mid, d, cam), cam);
  if (pose.position.z < -1e-6) throw DomainError("grasp point below the table plane");
  pose.position.z = std::max(0.0, pose.position.z);

  const Point3 a = camera_to_world(unproject(p1, d, cam), cam);
  const Point3 b = camera_to_world(unproject(p2, d, cam), cam);
  double dx = b.x - a.x;
  double dy = b.y - a.y;
  if (dx < 0.0 || (dx == 0.0 && dy < 0.0)) {
    dx = -dx;
    dy = -dy;
  }
  if (dx == 0.0 && dy == 0.0) throw DomainError("antipodal direction is vertical in the world");
  pose.yaw = canonical_grasp_yaw(std::atan2(dy, dx));
  return pose;
}

}  // namespace brainloop
