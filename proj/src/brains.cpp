#include "brainloop/brains.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "brainloop/errors.hpp"
#include "brainloop/hash.hpp"

namespace brainloop {

namespace {

constexpr double kDetourMargin = 0.15;  // beyond the robot radius
constexpr double kDetourLead = 0.9;     // past the obstacle's far edge
constexpr double kApproached = 0.5;     // footprint gap counted as "already there"

std::string fmt(const std::string& f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f.c_str(), a, b);
  return buf;
}

std::future<BrainReply> ready(BrainReply r) {
  std::promise<BrainReply> p;
  p.set_value(std::move(r));
  return p.get_future();
}

Decision make(Platform platform, Skill skill, std::string obs, std::string plan, std::vector<Pixel> kps = {}) {
  Decision d;
  d.observation = std::move(obs);
  d.plan = std::move(plan);
  d.keypoints = std::move(kps);
  d.skill = {platform, skill};
  return d;
}

std::optional<Pixel> to_pixel(const Eigen::Vector3d& world, const CameraModel& cam) {
  const Point3 pc = world_to_camera(Point3::from(world), cam);
  if (pc.z <= 1e-6) return std::nullopt;
  const Pixel px = project(pc, cam);
  if (!cam.contains(px)) return std::nullopt;
  return px;
}

// --- legged -----------------------------------------------------------------

std::vector<Eigen::Vector2d> corners(const WorldObject& o) {
  const Eigen::Vector2d c = o.center.head<2>();
  if (o.shape == ShapeKind::sphere) {
    const double r = o.radius();
    return {c + Eigen::Vector2d(r, r), c + Eigen::Vector2d(r, -r), c + Eigen::Vector2d(-r, r),
            c + Eigen::Vector2d(-r, -r)};
  }
  const Eigen::Vector2d e1(std::cos(o.yaw), std::sin(o.yaw));
  const Eigen::Vector2d e2(-e1.y(), e1.x());
  const double hx = o.half_extents.x(), hy = o.half_extents.y();
  return {c + e1 * hx + e2 * hy, c + e1 * hx - e2 * hy, c - e1 * hx + e2 * hy, c - e1 * hx - e2 * hy};
}

const WorldObject* first_blocker(const LeggedWorld& w, const Eigen::Vector2d& from, const Eigen::Vector2d& to,
                                 int exclude_id) {
  const double clearance = legged::kRobotRadius + 0.05;
  const double len = (to - from).norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.05)));
  const WorldObject* best = nullptr;
  double best_s = 2.0;
  for (const auto& o : w.objects) {
    if (o.id == exclude_id || o.place.kind != PlaceKind::ground) continue;
    if (o.cls != ObjectClass::obstacle && o.cls != ObjectClass::container) continue;
    const Shape s = o.shape_value();
    for (int i = 0; i <= steps; ++i) {
      const double f = static_cast<double>(i) / steps;
      const Eigen::Vector2d p = from + (to - from) * f;
      if (footprint_distance(s, p.x(), p.y()) < clearance) {
        if (f < best_s) {
          best_s = f;
          best = &o;
        }
        break;
      }
    }
  }
  return best;
}

// Single-tangent detour: a ground point past the obstacle such that the
// straight segment to it clears every footprint corner, on the side that
// needs the smaller swerve.
Eigen::Vector2d detour_point(const WorldObject& o, const Eigen::Vector2d& robot, const Eigen::Vector2d& goal,
                             int* side_out) {
  const Eigen::Vector2d u = (goal - robot).normalized();
  const Eigen::Vector2d n(-u.y(), u.x());
  const double clearance = legged::kRobotRadius + kDetourMargin;
  double far = 0.0;
  double slope[2] = {0.0, 0.0};
  for (const auto& c : corners(o)) {
    const double a = (c - robot).dot(u);
    const double b = (c - robot).dot(n);
    far = std::max(far, a);
    if (a <= 0.05) continue;
    slope[0] = std::max(slope[0], (b + clearance) / a);   // pass on the left
    slope[1] = std::max(slope[1], (-b + clearance) / a);  // pass on the right
  }
  const int side = slope[0] <= slope[1] ? 1 : -1;
  const double k = side > 0 ? slope[0] : slope[1];
  const double a_w = far + kDetourLead;
  if (side_out) *side_out = side;
  return robot + u * a_w + n * (side * k * a_w);
}

Decision legged_decide(const BrainQuery& q) {
  const LeggedWorld& w = *q.world->legged();
  const CameraModel& cam = q.observation.camera;
  const Pose2& rp = w.robot.pose;
  const Eigen::Vector2d robot(rp.x, rp.y);

  Eigen::Vector3d aim;
  Skill skill = Skill::walk;
  std::string what;
  const double gap = robot_gap(w, w.target_id);

  if (const Human* h = w.human(w.target_id)) {
    skill = skill_for_gesture(h->gesture);
    what = "person signalling " + std::string(to_string(h->gesture));
    aim = {h->pose.x, h->pose.y, 0.3};
    if (gap < kApproached && skill != Skill::walk && w.robot.posture != skill_name(skill)) {
      return make(Platform::legged, skill, what + fmt(", %.2f m away", gap),
                  "answer the gesture with " + std::string(skill_name(skill)));
    }
  } else if (const WorldObject* o = w.object(w.target_id)) {
    if (o->cls == ObjectClass::container) {
      skill = Skill::dump;
      what = "crate";
      aim = {o->center.x(), o->center.y(), 0.2};
      const Eigen::Vector2d rel = o->center.head<2>() - robot;
      const double bearing = wrap_angle(std::atan2(rel.y(), rel.x()) - rp.yaw);
      if (gap < 0.3 && std::abs(bearing) < std::numbers::pi / 4.0 && !w.robot.basket.empty()) {
        return make(Platform::legged, Skill::dump, "crate right in front", "empty the basket into it");
      }
    } else {
      what = "red ball";
      aim = o->center;
    }
  } else {
    return make(Platform::legged, Skill::turn_left, "nothing to go for", "look around");
  }

  // The target itself is never counted as in the way.
  const Eigen::Vector2d goal = aim.head<2>();
  std::string plan = "walk straight to the " + what;
  if (const WorldObject* blk = first_blocker(w, robot, goal, w.target_id)) {
    int side = 1;
    const Eigen::Vector2d wp = detour_point(*blk, robot, goal, &side);
    aim = {wp.x(), wp.y(), 0.0};
    skill = Skill::walk;
    plan = std::string("an obstacle is in the way; pass it on the ") + (side > 0 ? "left" : "right");
  }

  const Eigen::Vector3d rel3 = aim - Eigen::Vector3d(rp.x, rp.y, 0.0);
  const double bearing = wrap_angle(std::atan2(rel3.y(), rel3.x()) - rp.yaw);
  const std::string obs = what + fmt(" %.2f m away, bearing %.0f deg", rel3.head<2>().norm(), bearing * 180.0 / std::numbers::pi);
  const auto px = to_pixel(aim, cam);
  if (!px) {
    const Skill turn = bearing >= 0.0 ? Skill::turn_left : Skill::turn_right;
    return make(Platform::legged, turn, obs, "target is out of view; turn towards it");
  }
  return make(Platform::legged, skill, obs, plan, {*px});
}

// --- arm ----------------------------------------------------------------------

Eigen::Vector3d top_of(const WorldObject& o) {
  return o.center + Eigen::Vector3d(0, 0, o.shape == ShapeKind::sphere ? o.radius() : o.half_extents.z());
}

std::vector<Pixel> across(const Eigen::Vector3d& mid, const Eigen::Vector2d& dir, double half,
                          const CameraModel& cam) {
  const Eigen::Vector3d d(dir.x() * half, dir.y() * half, 0.0);
  auto a = to_pixel(mid - d, cam);
  auto b = to_pixel(mid + d, cam);
  if (!a || !b) return {};
  return {*a, *b};
}

bool goal_met(TaskId task, const ArmWorld& a, const WorldObject& o) {
  switch (task) {
    case TaskId::banana_in:
    case TaskId::pepper_in: return inside_box(a, o.center);
    default: return !inside_box(a, o.center) && o.place.kind == PlaceKind::table;
  }
}

Decision arm_decide(const BrainQuery& q) {
  const ArmWorld& a = *q.world->arm();
  const CameraModel& cam = q.observation.camera;
  const TaskId task = q.task;
  const bool drawer_task = task == TaskId::open_drawer || task == TaskId::lh_carrot || task == TaskId::lh_pepper;

  if (drawer_task && a.drawer < 0.95) {
    const Eigen::Vector3d top = handle_center(a).vec() + Eigen::Vector3d(0, 0, 0.01);
    return make(Platform::arm, Skill::pull, fmt("drawer %.0f%% open", a.drawer * 100.0),
                "hook the handle and pull", across(top, {0.0, 1.0}, 0.012, cam));
  }
  const WorldObject* o = a.object(a.target_id);
  if (!o) return make(Platform::arm, Skill::release, "target not found", "open the gripper");
  const std::string name(to_string(o->cls));

  if (a.held) {
    const bool into_box = task == TaskId::banana_in || task == TaskId::pepper_in;
    const Eigen::Vector3d dest = into_box ? Eigen::Vector3d(a.box_center.x(), a.box_center.y(), 0.0)
                                          : Eigen::Vector3d(0.0, 0.2, 0.0);
    return make(Platform::arm, Skill::release, "holding the " + name,
                into_box ? "put it in the box" : "set it down on the free table area",
                across(dest, {1.0, 0.0}, 0.03, cam));
  }
  if (goal_met(task, a, *o)) return make(Platform::arm, Skill::release, "the " + name + " is in place", "let go");

  Eigen::Vector2d dir(1.0, 0.0);
  double half = o->radius();
  if (o->shape == ShapeKind::box) {
    const bool long_x = o->half_extents.x() >= o->half_extents.y();
    const double axis = o->yaw + (long_x ? std::numbers::pi / 2.0 : 0.0);
    dir = {std::cos(axis), std::sin(axis)};
    half = long_x ? o->half_extents.y() : o->half_extents.x();
  }
  return make(Platform::arm, Skill::grasp, fmt("the " + name + " lies at (%.2f, %.2f)", o->center.x(), o->center.y()),
              "grasp it across its narrow side", across(top_of(*o), dir, 0.7 * half, cam));
}

}  // namespace

// ---------------------------------------------------------------------------

Decision OracleBrain::decide(const BrainQuery& q) {
  if (!q.world) throw Error("oracle brain needs the world snapshot");
  Decision d = q.world->platform() == Platform::legged ? legged_decide(q) : arm_decide(q);
  d.raw_text = serialize_decision(d);
  return d;
}

std::future<BrainReply> OracleBrain::submit(BrainQuery query) { return ready({decide(query).raw_text}); }

NoisyBrain::NoisyBrain(NoisyBrainConfig cfg) : cfg_(cfg) {
  if (cfg_.sigma_px < 0.0) throw DomainError("sigma_px must be >= 0");
  if (cfg_.p_wrong_skill < 0.0 || cfg_.p_wrong_skill > 1.0) throw DomainError("p_wrong_skill must be in [0, 1]");
}

Decision NoisyBrain::decide(const BrainQuery& q) const {
  Decision d = OracleBrain::decide(q);
  std::mt19937_64 rng(mix64(cfg_.seed ^ mix64(static_cast<std::uint64_t>(q.tick))));
  if (cfg_.sigma_px > 0.0) {
    std::normal_distribution<double> noise(0.0, cfg_.sigma_px);
    for (auto& kp : d.keypoints) {
      kp.u += noise(rng);
      kp.v += noise(rng);
    }
  }
  if (cfg_.p_wrong_skill > 0.0 && std::bernoulli_distribution(cfg_.p_wrong_skill)(rng)) {
    auto pool = skills_for(d.skill.platform);
    std::erase(pool, d.skill.skill);
    d.skill.skill = pool[std::uniform_int_distribution<size_t>(0, pool.size() - 1)(rng)];
  }
  d.raw_text = serialize_decision(d);
  return d;
}

std::future<BrainReply> NoisyBrain::submit(BrainQuery query) { return ready({decide(query).raw_text}); }

std::future<BrainReply> ScriptedBrain::submit(BrainQuery) {
  std::promise<BrainReply> p;
  if (next_ >= replies_.size()) {
    p.set_exception(std::make_exception_ptr(BrainUnavailable("script exhausted")));
  } else {
    const Entry& e = replies_[next_++];
    if (e.text) {
      p.set_value({*e.text});
    } else {
      p.set_exception(std::make_exception_ptr(BrainUnavailable(e.error)));
    }
  }
  return p.get_future();
}

}  // namespace brainloop
