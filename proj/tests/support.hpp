#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "brainloop/geometry.hpp"
#include "brainloop/scene.hpp"

namespace testing {

using namespace brainloop;

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

// 640x480 camera, looking along world +z unless given extrinsics.
inline CameraModel vga(const RigidTransform& ext = {}) {
  CameraModel c;
  c.fx = c.fy = 500.0;
  c.cx = 320.0;
  c.cy = 240.0;
  c.width = 640;
  c.height = 480;
  c.extrinsics = ext;
  return c;
}

// Camera frame rows for a camera at `eye` looking along `fwd` with world z up.
inline RigidTransform look(const Eigen::Vector3d& eye, const Eigen::Vector3d& fwd) {
  const Eigen::Vector3d z = fwd.normalized();
  const Eigen::Vector3d x = z.cross(Eigen::Vector3d::UnitZ()).normalized();
  const Eigen::Vector3d y = z.cross(x);
  RigidTransform t;
  t.rotation.col(0) = x;
  t.rotation.col(1) = y;
  t.rotation.col(2) = z;
  t.translation = eye;
  return t;
}

}  // namespace testing
