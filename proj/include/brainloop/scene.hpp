#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "brainloop/geometry.hpp"

namespace brainloop {

enum class ObjectClass : std::uint8_t {
  ground,
  table,
  obstacle,
  ball,
  human,
  human_marker,
  container,
  cabinet,
  drawer,
  handle,
  banana,
  pepper,
  carrot,
  kiwifruit,
};

std::string_view to_string(ObjectClass c);
std::optional<ObjectClass> object_class_from_string(std::string_view s);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

Rgb class_color(ObjectClass c);

struct Sphere {
  Eigen::Vector3d center;
  double radius = 0.0;
};

// Box rotated about the world z axis only.
struct Box {
  Eigen::Vector3d center;
  Eigen::Vector3d half_extents;
  double yaw = 0.0;
};

// Horizontal plane z = height, visible from above.
struct Plane {
  double height = 0.0;
};

using Shape = std::variant<Sphere, Box, Plane>;

struct Primitive {
  int id = 0;      // stable across frames
  int owner = 0;   // world object the primitive belongs to
  ObjectClass cls = ObjectClass::obstacle;
  Rgb color;
  Shape shape;
};

struct Hit {
  double t = 0.0;       // ray parameter
  size_t index = 0;     // into Scene::primitives
  Eigen::Vector3d point;
};

// A surface point expressed in the frame of the primitive it lies on, so it
// moves with that primitive.
struct Anchor {
  int primitive_id = 0;
  Eigen::Vector3d local;
};

class Scene {
 public:
  Scene() = default;
  explicit Scene(std::vector<Primitive> primitives) : primitives_(std::move(primitives)) {}

  const std::vector<Primitive>& primitives() const { return primitives_; }
  void add(Primitive p) { primitives_.push_back(std::move(p)); }

  // Nearest hit with t in (t_min, t_max).
  std::optional<Hit> raycast(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                             double t_min = 1e-9,
                             double t_max = std::numeric_limits<double>::infinity()) const;

  const Primitive* find(int primitive_id) const;
  std::optional<Anchor> anchor_at(const Hit& hit) const;
  std::optional<Point3> anchor_world(const Anchor& a) const;

 private:
  std::vector<Primitive> primitives_;
};

std::optional<double> intersect(const Shape& shape, const Eigen::Vector3d& origin,
                                const Eigen::Vector3d& dir, double t_min);

// Horizontal-plane distance from a point to a primitive's footprint (0 when
// inside). Planes have no footprint and return +inf.
double footprint_distance(const Shape& shape, double x, double y);

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // row-major RGB

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0) {}

  Rgb at(int x, int y) const {
    const size_t i = (static_cast<size_t>(y) * width + x) * 3;
    return {data[i], data[i + 1], data[i + 2]};
  }
};

// One camera frame plus the pose data the adapter is allowed to use.
struct Observation {
  std::int64_t frame_id = 0;
  RgbImage rgb;
  DepthImage depth;
  CameraModel camera;            // extrinsics: camera -> world
  RigidTransform mount;          // camera -> robot body
  // Analytic scene at capture time. Only privileged consumers (the oracle
  // tracker, scripted brains) may read it.
  std::shared_ptr<const Scene> scene;
  bool rendered = false;
  // Arm proprioception.
  std::optional<Point3> ee_position;
  bool ee_settled = true;
};

struct RenderOptions {
  // A pixel becomes a hole when a 4-neighbour is closer by more than this
  // (stereo shadow next to depth edges). 0 disables.
  double edge_hole_threshold = 0.5;
};

// Analytic z-buffer render: per-pixel nearest primitive, depth 0 where
// nothing is hit, flat class colour modulated by a per-object texture.
void render_into(const Scene& scene, const CameraModel& cam, const RenderOptions& opts,
                 RgbImage& rgb, DepthImage& depth);

// Debug exports.
void write_ppm(const RgbImage& img, const std::string& path);
void write_pgm(const DepthImage& depth, const std::string& path, double max_depth = 6.0);

}  // namespace brainloop
