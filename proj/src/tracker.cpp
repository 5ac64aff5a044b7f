#include "brainloop/tracker.hpp"

#include <algorithm>
#include <cmath>

#include "brainloop/errors.hpp"

namespace brainloop {

namespace {

void check_order(const TrackerState& state, const Observation& frame) {
  if (frame.frame_id <= state.last_frame_id) {
    throw OrderingError("frame " + std::to_string(frame.frame_id) + " is not newer than " +
                        std::to_string(state.last_frame_id));
  }
}

void check_bounds(const Observation& frame, std::span<const Pixel> keypoints) {
  for (const auto& kp : keypoints) {
    if (!std::isfinite(kp.u) || !std::isfinite(kp.v) || !frame.camera.contains(kp)) {
      throw DomainError("initial keypoint (" + std::to_string(kp.u) + ", " + std::to_string(kp.v) +
                        ") is outside the frame");
    }
  }
}

Eigen::Vector3d pixel_ray(const CameraModel& cam, const Pixel& p) {
  return cam.extrinsics.rotation *
         Eigen::Vector3d((p.u - cam.cx) / cam.fx, (p.v - cam.cy) / cam.fy, 1.0);
}

struct Window {
  double mean = 0.0;
  double norm = 0.0;  // sqrt of sum of squared deviations
};

Window stats(const std::vector<double>& v) {
  Window w;
  for (double x : v) w.mean += x;
  w.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - w.mean) * (x - w.mean);
  w.norm = std::sqrt(ss);
  return w;
}

std::optional<PatchTemplate> extract(const std::vector<double>& gray, int width, int height, int cx,
                                     int cy, int size) {
  const int h = size / 2;
  if (cx - h < 0 || cy - h < 0 || cx + h >= width || cy + h >= height) return std::nullopt;
  PatchTemplate t;
  t.size = size;
  t.values.reserve(static_cast<size_t>(size) * size);
  for (int y = cy - h; y <= cy + h; ++y) {
    for (int x = cx - h; x <= cx + h; ++x) t.values.push_back(gray[static_cast<size_t>(y) * width + x]);
  }
  return t;
}

}  // namespace

bool is_lost(const TrackerState& state, int k_frames, LostPolicy policy) {
  if (state.points.empty()) return false;
  auto lost = [&](const TrackedPoint& p) { return p.missed_frames >= k_frames; };
  if (policy == LostPolicy::any) return std::ranges::any_of(state.points, lost);
  return std::ranges::all_of(state.points, lost);
}

std::vector<double> to_gray(const RgbImage& img) {
  std::vector<double> g(static_cast<size_t>(img.width) * img.height);
  for (size_t i = 0; i < g.size(); ++i) {
    g[i] = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] + 0.114 * img.data[3 * i + 2];
  }
  return g;
}

// ---------------------------------------------------------------------------

OracleTracker::OracleTracker(OracleTrackerConfig cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {}

TrackerState OracleTracker::init_tracks(const Observation& frame, std::span<const Pixel> keypoints) {
  if (!frame.scene) throw Error("oracle tracker needs the analytic scene");
  check_bounds(frame, keypoints);
  TrackerState state;
  state.last_frame_id = frame.frame_id;
  const Eigen::Vector3d origin = frame.camera.extrinsics.translation;
  for (size_t i = 0; i < keypoints.size(); ++i) {
    TrackedPoint p;
    p.id = static_cast<int>(i);
    p.pixel = keypoints[i];
    if (auto hit = frame.scene->raycast(origin, pixel_ray(frame.camera, keypoints[i]))) {
      if (auto anchor = frame.scene->anchor_at(*hit)) p.memory = *anchor;
    }
    state.points.push_back(std::move(p));
  }
  return state;
}

TrackerState OracleTracker::update(const TrackerState& state, const Observation& frame) {
  check_order(state, frame);
  if (!frame.scene) throw Error("oracle tracker needs the analytic scene");
  TrackerState next = state;
  next.last_frame_id = frame.frame_id;
  const CameraModel& cam = frame.camera;
  std::normal_distribution<double> noise(0.0, cfg_.sigma_px > 0.0 ? cfg_.sigma_px : 1.0);
  std::bernoulli_distribution drop(std::clamp(cfg_.p_drop, 0.0, 1.0));

  for (auto& p : next.points) {
    const Anchor* anchor = std::get_if<Anchor>(&p.memory);
    std::optional<Point3> world = anchor ? frame.scene->anchor_world(*anchor) : std::nullopt;
    if (!world) {
      p.mark(false);
      p.confidence = 0.0;
      continue;
    }
    const Point3 pc = world_to_camera(*world, cam);
    if (!(pc.z > 0.0)) {
      p.mark(false);
      p.confidence = 0.0;
      continue;
    }
    Pixel px = project(pc, cam);
    if (cfg_.sigma_px > 0.0) {
      px.u += noise(rng_);
      px.v += noise(rng_);
    }
    bool visible = cam.contains(px);
    if (visible) {
      const Eigen::Vector3d dir = cam.extrinsics.rotation * (pc.vec() / pc.z);
      auto hit = frame.scene->raycast(cam.extrinsics.translation, dir, 1e-9,
                                      pc.z - cfg_.occlusion_margin);
      visible = !hit.has_value();
    }
    if (visible && cfg_.p_drop > 0.0 && drop(rng_)) visible = false;
    p.pixel = px;
    p.mark(visible);
    p.confidence = visible ? 1.0 : 0.0;
  }
  return next;
}

// ---------------------------------------------------------------------------

PatchTracker::PatchTracker(PatchTrackerConfig cfg) : cfg_(cfg) {
  if (cfg_.patch_size < 3 || cfg_.patch_size % 2 == 0) throw DomainError("patch size must be odd and >= 3");
  if (cfg_.search_radius < 1) throw DomainError("search radius must be >= 1");
}

TrackerState PatchTracker::init_tracks(const Observation& frame, std::span<const Pixel> keypoints) {
  check_bounds(frame, keypoints);
  const auto gray = to_gray(frame.rgb);
  TrackerState state;
  state.last_frame_id = frame.frame_id;
  for (size_t i = 0; i < keypoints.size(); ++i) {
    TrackedPoint p;
    p.id = static_cast<int>(i);
    p.pixel = keypoints[i];
    const int cx = static_cast<int>(std::lround(keypoints[i].u));
    const int cy = static_cast<int>(std::lround(keypoints[i].v));
    if (auto t = extract(gray, frame.rgb.width, frame.rgb.height, cx, cy, cfg_.patch_size)) {
      p.memory = std::move(*t);
    }
    state.points.push_back(std::move(p));
  }
  return state;
}

TrackerState PatchTracker::update(const TrackerState& state, const Observation& frame) {
  check_order(state, frame);
  TrackerState next = state;
  next.last_frame_id = frame.frame_id;
  const int w = frame.rgb.width;
  const int h = frame.rgb.height;
  const auto gray = to_gray(frame.rgb);
  const int half = cfg_.patch_size / 2;
  const int n = cfg_.patch_size;

  for (auto& p : next.points) {
    const auto* templ = std::get_if<PatchTemplate>(&p.memory);
    if (!templ) {
      p.mark(false);
      p.confidence = 0.0;
      continue;
    }
    const Window ts = stats(templ->values);
    const int cx0 = static_cast<int>(std::lround(p.pixel.u));
    const int cy0 = static_cast<int>(std::lround(p.pixel.v));

    double best = -2.0;
    int best_x = cx0, best_y = cy0;
    for (int dy = -cfg_.search_radius; dy <= cfg_.search_radius; ++dy) {
      const int cy = cy0 + dy;
      if (cy - half < 0 || cy + half >= h) continue;
      for (int dx = -cfg_.search_radius; dx <= cfg_.search_radius; ++dx) {
        const int cx = cx0 + dx;
        if (cx - half < 0 || cx + half >= w) continue;
        double sum = 0.0, sum2 = 0.0, cross = 0.0;
        for (int y = 0; y < n; ++y) {
          const double* row = &gray[static_cast<size_t>(cy - half + y) * w + (cx - half)];
          const double* trow = &templ->values[static_cast<size_t>(y) * n];
          for (int x = 0; x < n; ++x) {
            sum += row[x];
            sum2 += row[x] * row[x];
            cross += row[x] * (trow[x] - ts.mean);
          }
        }
        const double count = static_cast<double>(n) * n;
        const double var = sum2 - sum * sum / count;
        const double denom = std::sqrt(std::max(var, 0.0)) * ts.norm;
        const double score = denom > 1e-9 ? cross / denom : 0.0;
        if (score > best) {
          best = score;
          best_x = cx;
          best_y = cy;
        }
      }
    }

    const bool visible = best >= cfg_.ncc_threshold;
    p.confidence = std::clamp(best, 0.0, 1.0);
    if (visible) {
      p.pixel = {static_cast<double>(best_x), static_cast<double>(best_y)};
      if (auto t = extract(gray, w, h, best_x, best_y, n)) p.memory = std::move(*t);
    }
    p.mark(visible);
  }
  return next;
}

}  // namespace brainloop
