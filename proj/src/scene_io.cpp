#include <cmath>
#include <numbers>
#include <random>

#include "brainloop/errors.hpp"
#include "brainloop/hash.hpp"
#include "brainloop/simulator.hpp"

namespace brainloop {

namespace {

using nlohmann::json;

class Jitter {
 public:
  Jitter(std::uint64_t seed, TaskId task) : rng_(mix64(seed * 131 + static_cast<std::uint64_t>(task))) {}
  double operator()(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double sign() { return (*this)(0.0, 1.0) < 0.5 ? -1.0 : 1.0; }

 private:
  std::mt19937_64 rng_;
};

WorldObject ball(int id, double x, double y) {
  WorldObject o;
  o.id = id;
  o.cls = ObjectClass::ball;
  o.shape = ShapeKind::sphere;
  o.half_extents = Eigen::Vector3d::Constant(0.12);
  o.center = {x, y, 0.12};
  return o;
}

WorldObject crate(int id, double x, double y, double yaw) {
  WorldObject o;
  o.id = id;
  o.cls = ObjectClass::container;
  o.half_extents = {0.25, 0.25, 0.2};
  o.center = {x, y, 0.2};
  o.yaw = yaw;
  return o;
}

// Obstacle centred on the segment robot->goal at distance `along`, nudged
// sideways by at most 0.1 m so it always cuts the straight path.
WorldObject blocker(int id, Jitter& j, const Eigen::Vector2d& goal) {
  const Eigen::Vector2d u = goal.normalized();
  const Eigen::Vector2d n(-u.y(), u.x());
  const double along = j(1.6, 2.2);
  const Eigen::Vector2d c = u * along + n * j(-0.1, 0.1);
  WorldObject o;
  o.id = id;
  o.cls = ObjectClass::obstacle;
  o.half_extents = {j(0.15, 0.25), j(0.4, 0.6), 0.4};
  o.center = {c.x(), c.y(), 0.4};
  o.yaw = std::atan2(u.y(), u.x());
  return o;
}

WorldObject produce(int id, ObjectClass cls, double x, double y, double base, double yaw) {
  WorldObject o;
  o.id = id;
  o.cls = cls;
  o.yaw = yaw;
  switch (cls) {
    case ObjectClass::banana: o.half_extents = {0.08, 0.018, 0.018}; break;
    case ObjectClass::pepper: o.half_extents = {0.04, 0.03, 0.02}; break;
    case ObjectClass::carrot: o.half_extents = {0.07, 0.015, 0.015}; break;
    default:
      o.shape = ShapeKind::sphere;
      o.half_extents = Eigen::Vector3d::Constant(0.025);
      o.yaw = 0.0;
      break;
  }
  o.center = {x, y, base + o.half_extents.z()};
  return o;
}

LeggedWorld legged_layout(const SceneRequest& req, Jitter& j) {
  LeggedWorld w;
  w.robot.pose = {j(-0.2, 0.2), j(-0.2, 0.2), j(-0.15, 0.15)};
  const Eigen::Vector2d origin(w.robot.pose.x, w.robot.pose.y);
  const TaskId t = req.task;
  const bool complex = is_complex(t);

  const double dist = complex ? j(3.4, 4.0) : j(2.5, 3.2);
  const double lat = complex ? j(-0.3, 0.3) : j(-0.6, 0.6);
  const Eigen::Vector2d goal(dist, lat);
  const Eigen::Vector2d g = origin + goal;

  switch (t) {
    case TaskId::find:
    case TaskId::complex_find:
      w.objects.push_back(ball(1, g.x(), g.y()));
      w.target_id = 1;
      break;
    case TaskId::track: {
      WorldObject b = ball(1, g.x(), g.y());
      Motion m;
      const double s = j.sign();
      m.waypoints = {g, g + Eigen::Vector2d(0.8, s * 0.9)};
      m.speed = 0.08;
      m.next = 1;
      b.motion = m;
      w.objects.push_back(b);
      w.target_id = 1;
      break;
    }
    case TaskId::interaction:
    case TaskId::complex_interaction: {
      Human h;
      h.id = 10;
      h.pose = {g.x(), g.y(), std::atan2(origin.y() - g.y(), origin.x() - g.x())};
      h.gesture = gesture_for_trial(t, req.trial_index);
      w.humans.push_back(h);
      w.target_id = h.id;
      break;
    }
    case TaskId::transport:
    case TaskId::complex_transport: {
      w.objects.push_back(crate(1, g.x(), g.y(), std::atan2(origin.y() - g.y(), origin.x() - g.x())));
      w.target_id = 1;
      const int items = j(0.0, 1.0) < 0.5 ? 1 : 2;
      for (int i = 0; i < items; ++i) {
        WorldObject it = produce(2 + i, i == 0 ? ObjectClass::kiwifruit : ObjectClass::pepper, 0, 0, 0, 0);
        it.place = {PlaceKind::basket, -1};
        w.robot.basket.push_back(it.id);
        w.objects.push_back(it);
      }
      break;
    }
    default: throw DomainError("not a legged task");
  }
  if (complex) {
    w.objects.push_back(blocker(5, j, goal));
    w.objects.back().center.head<2>() += origin;
  }
  return w;
}

ArmWorld arm_layout(const SceneRequest& req, Jitter& j) {
  ArmWorld w;
  w.box_center = {0.28 + j(-0.03, 0.03), 0.45 + j(-0.03, 0.03)};
  const double yaw = j(0.0, std::numbers::pi);
  auto on_table = [&](ObjectClass cls) {
    return produce(1, cls, j(-0.10, 0.05), j(0.15, 0.28), 0.0, yaw);
  };
  auto in_box = [&](ObjectClass cls) {
    return produce(1, cls, w.box_center.x() + j(-0.02, 0.02), w.box_center.y() + j(-0.02, 0.02), 0.0, yaw);
  };
  auto in_tray = [&](ObjectClass cls) {
    WorldObject o = produce(1, cls, arm::kTrayCenterX + j(-0.03, 0.03), tray_front_y(w.drawer) + 0.17,
                            arm::kTrayFloor, j(-0.2, 0.2));
    o.place = {PlaceKind::drawer, -1};
    return o;
  };

  WorldObject o;
  switch (req.task) {
    case TaskId::banana_in: o = on_table(ObjectClass::banana); break;
    case TaskId::pepper_in: o = on_table(ObjectClass::pepper); break;
    case TaskId::carrot_out: o = in_box(ObjectClass::carrot); break;
    case TaskId::kiwifruit_out: o = in_box(ObjectClass::kiwifruit); break;
    case TaskId::open_drawer: o = in_tray(ObjectClass::kiwifruit); break;
    case TaskId::lh_carrot: o = in_tray(ObjectClass::carrot); break;
    case TaskId::lh_pepper: o = in_tray(ObjectClass::pepper); break;
    default: throw DomainError("not an arm task");
  }
  if (o.place.kind != PlaceKind::drawer) support_height(w, o.center.x(), o.center.y(), &o.place);
  w.objects.push_back(o);
  w.target_id = o.id;
  return w;
}

// --- JSON -------------------------------------------------------------------

json vec(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Eigen::Vector2d vec2(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected a 2-vector");
  return {j[0].get<double>(), j[1].get<double>()};
}

PlaceKind place_from_string(const std::string& s) {
  for (PlaceKind k : {PlaceKind::ground, PlaceKind::table, PlaceKind::basket, PlaceKind::container,
                      PlaceKind::gripper, PlaceKind::drawer}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown place: " + s);
}

json object_json(const WorldObject& o) {
  json j{{"id", o.id},
         {"class", std::string(to_string(o.cls))},
         {"shape", o.shape == ShapeKind::sphere ? "sphere" : "box"},
         {"center", vec(o.center)},
         {"half_extents", vec(o.half_extents)},
         {"yaw", o.yaw},
         {"place", std::string(to_string(o.place.kind))},
         {"container_id", o.place.container_id}};
  if (o.motion) {
    json wps = json::array();
    for (const auto& p : o.motion->waypoints) wps.push_back({p.x(), p.y()});
    j["motion"] = {{"waypoints", wps}, {"speed", o.motion->speed}, {"next", o.motion->next}};
  }
  return j;
}

WorldObject object_from_json(const json& j) {
  WorldObject o;
  o.id = j.at("id").get<int>();
  const auto cls = object_class_from_string(j.at("class").get<std::string>());
  if (!cls) throw ConfigError("unknown object class: " + j.at("class").get<std::string>());
  o.cls = *cls;
  const std::string shape = j.at("shape").get<std::string>();
  if (shape != "sphere" && shape != "box") throw ConfigError("unknown shape: " + shape);
  o.shape = shape == "sphere" ? ShapeKind::sphere : ShapeKind::box;
  o.center = vec3(j.at("center"));
  o.half_extents = vec3(j.at("half_extents"));
  o.yaw = j.value("yaw", 0.0);
  o.place.kind = place_from_string(j.value("place", std::string("ground")));
  o.place.container_id = j.value("container_id", -1);
  if (j.contains("motion")) {
    Motion m;
    for (const auto& p : j["motion"].at("waypoints")) m.waypoints.push_back(vec2(p));
    m.speed = j["motion"].at("speed").get<double>();
    m.next = j["motion"].value("next", size_t{1});
    if (m.waypoints.size() < 2 || m.next >= m.waypoints.size() || m.speed < 0.0) {
      throw ConfigError("bad motion for object " + std::to_string(o.id));
    }
    o.motion = m;
  }
  return o;
}

}  // namespace

Simulator generate_scene(const SceneRequest& req) {
  Jitter j(req.seed, req.task);
  if (task_spec(req.task).platform == Platform::legged) return Simulator(legged_layout(req, j));
  return Simulator(arm_layout(req, j));
}

json scene_to_json(const Simulator& sim) {
  json out;
  json objects = json::array();
  if (const auto* w = sim.legged()) {
    out["platform"] = "legged";
    out["robot"] = {{"x", w->robot.pose.x},
                    {"y", w->robot.pose.y},
                    {"yaw", w->robot.pose.yaw},
                    {"posture", w->robot.posture},
                    {"basket", w->robot.basket}};
    for (const auto& o : w->objects) objects.push_back(object_json(o));
    json humans = json::array();
    for (const auto& h : w->humans) {
      humans.push_back({{"id", h.id},
                        {"x", h.pose.x},
                        {"y", h.pose.y},
                        {"yaw", h.pose.yaw},
                        {"gesture", std::string(to_string(h.gesture))}});
    }
    out["humans"] = humans;
    out["ground"] = w->ground;
    out["target_id"] = w->target_id;
  } else {
    const auto& a = *sim.arm();
    out["platform"] = "arm";
    out["ee"] = vec(a.ee.vec());
    out["ee_yaw"] = a.ee_yaw;
    out["gripper"] = a.gripper == GripperState::open ? "open" : "closed";
    out["held"] = a.held ? *a.held : -1;
    out["held_offset"] = vec(a.held_offset);
    out["drawer"] = a.drawer;
    out["box_center"] = {a.box_center.x(), a.box_center.y()};
    out["motion_ticks"] = a.motion_ticks;
    for (const auto& o : a.objects) objects.push_back(object_json(o));
    out["target_id"] = a.target_id;
  }
  out["objects"] = objects;
  return out;
}

Simulator scene_from_json(const json& j) {
  try {
    const std::string platform = j.at("platform").get<std::string>();
    if (platform == "legged") {
      LeggedWorld w;
      const auto& r = j.at("robot");
      w.robot.pose = {r.at("x").get<double>(), r.at("y").get<double>(), r.value("yaw", 0.0)};
      w.robot.posture = r.value("posture", std::string("stand"));
      w.robot.basket = r.value("basket", std::vector<int>{});
      for (const auto& o : j.value("objects", json::array())) w.objects.push_back(object_from_json(o));
      for (const auto& h : j.value("humans", json::array())) {
        Human hu;
        hu.id = h.at("id").get<int>();
        hu.pose = {h.at("x").get<double>(), h.at("y").get<double>(), h.value("yaw", 0.0)};
        const auto g = gesture_from_string(h.value("gesture", std::string("none")));
        if (!g) throw ConfigError("unknown gesture");
        hu.gesture = *g;
        w.humans.push_back(hu);
      }
      w.ground = j.value("ground", true);
      w.target_id = j.value("target_id", -1);
      return Simulator(std::move(w));
    }
    if (platform == "arm") {
      ArmWorld a;
      if (j.contains("ee")) a.ee = Point3::from(vec3(j["ee"]));
      a.ee_yaw = j.value("ee_yaw", 0.0);
      a.gripper = j.value("gripper", std::string("open")) == "closed" ? GripperState::closed : GripperState::open;
      const int held = j.value("held", -1);
      if (held >= 0) a.held = held;
      if (j.contains("held_offset")) a.held_offset = vec3(j["held_offset"]);
      a.drawer = j.value("drawer", 0.5);
      if (a.drawer < 0.0 || a.drawer > 1.0) throw ConfigError("drawer fraction must be in [0, 1]");
      if (j.contains("box_center")) a.box_center = vec2(j["box_center"]);
      a.motion_ticks = j.value("motion_ticks", 15);
      for (const auto& o : j.value("objects", json::array())) a.objects.push_back(object_from_json(o));
      a.target_id = j.value("target_id", -1);
      return Simulator(std::move(a));
    }
    throw ConfigError("unknown platform: " + platform);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scene file: ") + e.what());
  }
}

}  // namespace brainloop
