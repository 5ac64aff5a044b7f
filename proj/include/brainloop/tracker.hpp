#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "brainloop/geometry.hpp"
#include "brainloop/scene.hpp"

namespace brainloop {

// Grayscale patch remembered by the correlation tracker.
struct PatchTemplate {
  int size = 0;
  std::vector<double> values;  // size*size, row-major
};

using TrackMemory = std::variant<std::monostate, Anchor, PatchTemplate>;

struct TrackedPoint {
  int id = 0;
  Pixel pixel;
  bool visible = true;
  double confidence = 1.0;
  int missed_frames = 0;
  TrackMemory memory;

  // Records one frame's visibility; keeps missed_frames consistent.
  void mark(bool is_visible) {
    visible = is_visible;
    missed_frames = is_visible ? 0 : missed_frames + 1;
  }
};

struct TrackerState {
  std::vector<TrackedPoint> points;
  std::int64_t last_frame_id = -1;
};

enum class LostPolicy { all, any };

// Takeover trigger. An empty state is never lost.
bool is_lost(const TrackerState& state, int k_frames, LostPolicy policy = LostPolicy::all);

class PointTracker {
 public:
  virtual ~PointTracker() = default;
  // Throws DomainError if a keypoint lies outside the frame.
  virtual TrackerState init_tracks(const Observation& frame, std::span<const Pixel> keypoints) = 0;
  // Throws OrderingError unless frame.frame_id > state.last_frame_id.
  virtual TrackerState update(const TrackerState& state, const Observation& frame) = 0;
};

struct OracleTrackerConfig {
  double sigma_px = 0.0;
  double p_drop = 0.0;
  double occlusion_margin = 0.01;  // metres
};

// Privileged tracker: anchors each keypoint to the surface it hits at init and
// re-projects that anchor through every later camera.
class OracleTracker final : public PointTracker {
 public:
  OracleTracker(OracleTrackerConfig cfg, std::uint64_t seed);
  TrackerState init_tracks(const Observation& frame, std::span<const Pixel> keypoints) override;
  TrackerState update(const TrackerState& state, const Observation& frame) override;

 private:
  OracleTrackerConfig cfg_;
  std::mt19937_64 rng_;
};

struct PatchTrackerConfig {
  int patch_size = 11;
  int search_radius = 16;
  double ncc_threshold = 0.6;
};

// Normalised cross-correlation template matching around the previous
// estimate. Integer-pixel resolution.
class PatchTracker final : public PointTracker {
 public:
  explicit PatchTracker(PatchTrackerConfig cfg);
  TrackerState init_tracks(const Observation& frame, std::span<const Pixel> keypoints) override;
  TrackerState update(const TrackerState& state, const Observation& frame) override;

 private:
  PatchTrackerConfig cfg_;
};

// Luma image used by the patch tracker.
std::vector<double> to_gray(const RgbImage& img);

}  // namespace brainloop
