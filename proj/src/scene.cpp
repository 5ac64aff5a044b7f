#include "brainloop/scene.hpp"

#include <array>
#include <cmath>
#include <fstream>

#include "brainloop/errors.hpp"
#include "brainloop/hash.hpp"

namespace brainloop {

namespace {

constexpr std::array<std::string_view, 14> kClassNames{
    "ground",    "table",  "obstacle", "ball",    "human",  "human_marker", "container",
    "cabinet",   "drawer", "handle",   "banana",  "pepper", "carrot",       "kiwifruit",
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

Eigen::Vector3d rot_z(const Eigen::Vector3d& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z()};
}

Eigen::Vector3d to_local(const Box& b, const Eigen::Vector3d& p) { return rot_z(p - b.center, -b.yaw); }

std::optional<double> intersect_sphere(const Sphere& sp, const Eigen::Vector3d& o,
                                       const Eigen::Vector3d& d, double t_min) {
  const Eigen::Vector3d oc = o - sp.center;
  const double a = d.squaredNorm();
  const double b = oc.dot(d);
  const double c = oc.squaredNorm() - sp.radius * sp.radius;
  const double disc = b * b - a * c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  double t = (-b - root) / a;
  if (t > t_min) return t;
  t = (-b + root) / a;
  if (t > t_min) return t;
  return std::nullopt;
}

std::optional<double> intersect_box(const Box& bx, const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                                    double t_min) {
  const Eigen::Vector3d lo = to_local(bx, o);
  const Eigen::Vector3d ld = rot_z(d, -bx.yaw);
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double h = bx.half_extents[i];
    if (std::abs(ld[i]) < 1e-15) {
      if (lo[i] < -h || lo[i] > h) return std::nullopt;
      continue;
    }
    double a = (-h - lo[i]) / ld[i];
    double b = (h - lo[i]) / ld[i];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return std::nullopt;
  }
  if (t0 > t_min) return t0;
  if (t1 > t_min) return t1;
  return std::nullopt;
}

std::optional<double> intersect_plane(const Plane& pl, const Eigen::Vector3d& o,
                                      const Eigen::Vector3d& d, double t_min) {
  if (o.z() <= pl.height || d.z() >= 0.0) return std::nullopt;
  const double t = (pl.height - o.z()) / d.z();
  if (t > t_min) return t;
  return std::nullopt;
}

double texture_factor(const Primitive& p, const Eigen::Vector3d& local) {
  const double cell = (p.cls == ObjectClass::ground || p.cls == ObjectClass::table) ? 0.15 : 0.04;
  std::uint64_t h = mix64(static_cast<std::uint64_t>(p.owner) + 0x51ULL);
  for (int i = 0; i < 3; ++i) {
    h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(std::floor(local[i] / cell))));
  }
  return 0.55 + 0.45 * static_cast<double>(h >> 11) * 0x1.0p-53;
}

Eigen::Vector3d local_point(const Primitive& p, const Eigen::Vector3d& world) {
  return std::visit(overloaded{
                        [&](const Sphere& s) -> Eigen::Vector3d { return world - s.center; },
                        [&](const Box& b) -> Eigen::Vector3d { return to_local(b, world); },
                        [&](const Plane&) -> Eigen::Vector3d { return world; },
                    },
                    p.shape);
}

}  // namespace

std::string_view to_string(ObjectClass c) { return kClassNames[static_cast<size_t>(c)]; }

std::optional<ObjectClass> object_class_from_string(std::string_view s) {
  for (size_t i = 0; i < kClassNames.size(); ++i) {
    if (kClassNames[i] == s) return static_cast<ObjectClass>(i);
  }
  return std::nullopt;
}

Rgb class_color(ObjectClass c) {
  switch (c) {
    case ObjectClass::ground: return {120, 110, 95};
    case ObjectClass::table: return {150, 120, 90};
    case ObjectClass::obstacle: return {90, 90, 160};
    case ObjectClass::ball: return {220, 60, 50};
    case ObjectClass::human: return {60, 150, 200};
    case ObjectClass::human_marker: return {255, 255, 255};
    case ObjectClass::container: return {170, 140, 60};
    case ObjectClass::cabinet: return {110, 80, 60};
    case ObjectClass::drawer: return {140, 100, 70};
    case ObjectClass::handle: return {200, 200, 210};
    case ObjectClass::banana: return {240, 220, 60};
    case ObjectClass::pepper: return {60, 200, 70};
    case ObjectClass::carrot: return {245, 130, 30};
    case ObjectClass::kiwifruit: return {130, 100, 50};
  }
  return {};
}

std::optional<double> intersect(const Shape& shape, const Eigen::Vector3d& origin,
                                const Eigen::Vector3d& dir, double t_min) {
  return std::visit(overloaded{
                        [&](const Sphere& s) { return intersect_sphere(s, origin, dir, t_min); },
                        [&](const Box& b) { return intersect_box(b, origin, dir, t_min); },
                        [&](const Plane& p) { return intersect_plane(p, origin, dir, t_min); },
                    },
                    shape);
}

double footprint_distance(const Shape& shape, double x, double y) {
  return std::visit(
      overloaded{
          [&](const Sphere& s) {
            return std::max(0.0, std::hypot(x - s.center.x(), y - s.center.y()) - s.radius);
          },
          [&](const Box& b) {
            const Eigen::Vector3d l = to_local(b, {x, y, b.center.z()});
            const double dx = std::max(0.0, std::abs(l.x()) - b.half_extents.x());
            const double dy = std::max(0.0, std::abs(l.y()) - b.half_extents.y());
            return std::hypot(dx, dy);
          },
          [&](const Plane&) { return std::numeric_limits<double>::infinity(); },
      },
      shape);
}

std::optional<Hit> Scene::raycast(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                                  double t_min, double t_max) const {
  std::optional<Hit> best;
  for (size_t i = 0; i < primitives_.size(); ++i) {
    auto t = intersect(primitives_[i].shape, origin, dir, t_min);
    if (t && *t < t_max && (!best || *t < best->t)) best = Hit{*t, i, origin + *t * dir};
  }
  return best;
}

const Primitive* Scene::find(int primitive_id) const {
  for (const auto& p : primitives_) {
    if (p.id == primitive_id) return &p;
  }
  return nullptr;
}

std::optional<Anchor> Scene::anchor_at(const Hit& hit) const {
  if (hit.index >= primitives_.size()) return std::nullopt;
  const auto& p = primitives_[hit.index];
  return Anchor{p.id, local_point(p, hit.point)};
}

std::optional<Point3> Scene::anchor_world(const Anchor& a) const {
  const Primitive* p = find(a.primitive_id);
  if (!p) return std::nullopt;
  const Eigen::Vector3d w =
      std::visit(overloaded{
                     [&](const Sphere& s) -> Eigen::Vector3d { return s.center + a.local; },
                     [&](const Box& b) -> Eigen::Vector3d { return b.center + rot_z(a.local, b.yaw); },
                     [&](const Plane&) -> Eigen::Vector3d { return a.local; },
                 },
                 p->shape);
  return Point3::from(w);
}

void render_into(const Scene& scene, const CameraModel& cam, const RenderOptions& opts,
                 RgbImage& rgb, DepthImage& depth) {
  rgb = RgbImage(cam.width, cam.height);
  depth = DepthImage(cam.width, cam.height);
  const Eigen::Matrix3d& r = cam.extrinsics.rotation;
  const Eigen::Vector3d origin = cam.extrinsics.translation;
  const auto& prims = scene.primitives();

  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      // With the camera-frame direction scaled to z = 1 the ray parameter is
      // the camera-frame depth.
      const Eigen::Vector3d d_cam((x - cam.cx) / cam.fx, (y - cam.cy) / cam.fy, 1.0);
      const Eigen::Vector3d d = r * d_cam;
      double best_t = std::numeric_limits<double>::infinity();
      size_t best_i = prims.size();
      for (size_t i = 0; i < prims.size(); ++i) {
        auto t = intersect(prims[i].shape, origin, d, 1e-9);
        if (t && *t < best_t) {
          best_t = *t;
          best_i = i;
        }
      }
      if (best_i == prims.size()) continue;
      depth.at(x, y) = best_t;
      const auto& p = prims[best_i];
      const double f = texture_factor(p, local_point(p, origin + best_t * d));
      const size_t o = (static_cast<size_t>(y) * cam.width + x) * 3;
      rgb.data[o] = static_cast<std::uint8_t>(p.color.r * f);
      rgb.data[o + 1] = static_cast<std::uint8_t>(p.color.g * f);
      rgb.data[o + 2] = static_cast<std::uint8_t>(p.color.b * f);
    }
  }

  if (opts.edge_hole_threshold > 0.0) {
    const DepthImage src = depth;
    auto closer = [&](int x, int y, double d) {
      if (x < 0 || y < 0 || x >= src.width || y >= src.height) return false;
      const double n = src.at(x, y);
      return n > 0.0 && d - n > opts.edge_hole_threshold;
    };
    for (int y = 0; y < src.height; ++y) {
      for (int x = 0; x < src.width; ++x) {
        const double d = src.at(x, y);
        if (d <= 0.0) continue;
        if (closer(x - 1, y, d) || closer(x + 1, y, d) || closer(x, y - 1, d) || closer(x, y + 1, d)) {
          depth.at(x, y) = 0.0;
        }
      }
    }
  }
}

void write_ppm(const RgbImage& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  f << "P6\n" << img.width << " " << img.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
}

void write_pgm(const DepthImage& depth, const std::string& path, double max_depth) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  f << "P5\n" << depth.width << " " << depth.height << "\n255\n";
  for (double d : depth.data) {
    // Near is bright, holes are black.
    const double v = d <= 0.0 ? 0.0 : 255.0 * (1.0 - std::min(d, max_depth) / max_depth);
    f.put(static_cast<char>(static_cast<std::uint8_t>(std::lround(std::max(1.0, v)))));
  }
}

}  // namespace brainloop
