// Acceptance battery: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "brainloop/adapter.hpp"
#include "brainloop/benchmark.hpp"
#include "brainloop/decision.hpp"
#include "brainloop/episode.hpp"
#include "brainloop/errors.hpp"
#include "brainloop/scene.hpp"
#include "brainloop/tracker.hpp"
#include "support.hpp"

using namespace brainloop;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

int failures = 0;

void report(int n, const std::string& title, Outcome& o, double secs) {
  if (!o.pass) ++failures;
  std::printf("criterion %d %-28s %s  %s(%.2f s)\n", n, title.c_str(), o.pass ? "PASS" : "FAIL",
              o.detail.str().c_str(), secs);
  std::fflush(stdout);
}

// --- 1 geometry ---------------------------------------------------------------

void geometry() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> pu(0, 639), pv(0, 479), d(0.1, 20.0), u(-10, 10);

  double worst_px = 0;
  for (int i = 0; i < 1000; ++i) {
    RigidTransform ext;
    ext.rotation = testing::random_rotation(rng);
    ext.translation = {u(rng), u(rng), u(rng)};
    const CameraModel cam = testing::vga(ext);
    const Pixel px{pu(rng), pv(rng)};
    const Pixel back = project(world_to_camera(camera_to_world(unproject(px, d(rng), cam), cam), cam), cam);
    worst_px = std::max({worst_px, std::abs(back.u - px.u), std::abs(back.v - px.v)});
  }
  o.require(worst_px < 1e-9, "round trip");

  double worst_tan = 0;
  int constrained = 0;
  VelocityLimits lim;
  for (int i = 0; i < 1000; ++i) {
    const VelocityCommand c = velocity_command({u(rng), u(rng), u(rng)}, lim);
    if (std::abs(c.vx) > 1e-6) {
      ++constrained;
      worst_tan = std::max(worst_tan, std::abs(std::tan(c.vyaw) - c.vy / c.vx));
    }
  }
  o.require(worst_tan < 1e-9, "yaw constraint");

  RigidTransform down;
  down.rotation << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  down.translation = {0, 0, 2};
  const CameraModel cam = testing::vga(down);
  DepthImage depth(640, 480);
  for (int y = 0; y < 480; ++y) {
    for (int x = 0; x < 640; ++x) depth.at(x, y) = 1.2 + 0.0005 * x + 0.0003 * y;
  }
  int swaps = 0;
  for (int i = 0; i < 1000; ++i) {
    const Pixel a{pu(rng), pv(rng)}, b{pu(rng), pv(rng)};
    const GraspPose g1 = grasp_from_antipodal(a, b, depth, cam, GraspMode::grasp);
    const GraspPose g2 = grasp_from_antipodal(b, a, depth, cam, GraspMode::grasp);
    swaps += g1 == g2 && g1.yaw >= 0.0 && g1.yaw < std::numbers::pi;
  }
  o.require(swaps == 1000, "swap invariance");

  const double secs = seconds_since(t0);
  o.require(secs < 1.0, "time budget 1 s");
  o.detail << "round trip max " << worst_px << " px, tan max " << worst_tan << " over " << constrained
           << ", swaps " << swaps << "/1000 ";
  report(1, "geometry properties", o, secs);
}

// --- 2 tracker ----------------------------------------------------------------

Eigen::Vector3d ground_hit(const CameraModel& cam, const Pixel& p) {
  const Eigen::Vector3d dir =
      cam.extrinsics.rotation * Eigen::Vector3d((p.u - cam.cx) / cam.fx, (p.v - cam.cy) / cam.fy, 1);
  const double t = -cam.extrinsics.translation.z() / dir.z();
  return cam.extrinsics.translation + t * dir;
}

RgbImage noise_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RgbImage img(w, h);
  for (auto& b : img.data) b = static_cast<std::uint8_t>(rng() % 256);
  return img;
}

RgbImage shifted(const RgbImage& src, int sx, int sy) {
  RgbImage out(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      const int ox = std::clamp(x - sx, 0, src.width - 1), oy = std::clamp(y - sy, 0, src.height - 1);
      for (int c = 0; c < 3; ++c) {
        out.data[(static_cast<size_t>(y) * src.width + x) * 3 + c] =
            src.data[(static_cast<size_t>(oy) * src.width + ox) * 3 + c];
      }
    }
  }
  return out;
}

Observation image_frame(std::int64_t id, RgbImage img) {
  Observation o;
  o.frame_id = id;
  o.camera.fx = o.camera.fy = 70;
  o.camera.width = img.width;
  o.camera.height = img.height;
  o.camera.cx = (img.width - 1) / 2.0;
  o.camera.cy = (img.height - 1) / 2.0;
  o.rgb = std::move(img);
  return o;
}

void tracker() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-1, 1);
  auto scene = std::make_shared<Scene>();
  scene->add({0, 0, ObjectClass::ground, {}, Plane{0.0}});
  OracleTracker oracle({}, 7);
  double worst = 0;
  int checked = 0, visibility_mismatch = 0;
  for (int traj = 0; traj < 100; ++traj) {
    Eigen::Vector3d eye(u(rng), u(rng), 2.0 + 0.5 * u(rng));
    auto frame = [&](std::int64_t id, const Eigen::Vector3d& at) {
      Observation f;
      f.frame_id = id;
      f.camera = testing::vga(testing::look(eye, at - eye));
      f.scene = scene;
      return f;
    };
    const Observation f0 = frame(0, {3, 0, 0});
    std::vector<Pixel> kp;
    for (int i = 0; i < 8; ++i) kp.push_back({320 + 250 * u(rng), 300 + 150 * std::abs(u(rng))});
    std::vector<Eigen::Vector3d> truth;
    for (const auto& p : kp) truth.push_back(ground_hit(f0.camera, p));
    TrackerState s = oracle.init_tracks(f0, kp);
    for (int step = 1; step <= 10; ++step) {
      eye += Eigen::Vector3d(0.1 * u(rng), 0.1 * u(rng), 0.05 * u(rng));
      const Observation f = frame(step, {3, 0.3 * u(rng), 0});
      s = oracle.update(s, f);
      for (size_t i = 0; i < kp.size(); ++i) {
        const Pixel want = project(world_to_camera(Point3::from(truth[i]), f.camera), f.camera);
        worst = std::max({worst, std::abs(s.points[i].pixel.u - want.u), std::abs(s.points[i].pixel.v - want.v)});
        visibility_mismatch += s.points[i].visible != f.camera.contains(want);
        ++checked;
      }
    }
  }
  o.require(worst < 1e-6 && visibility_mismatch == 0, "oracle tracker");

  const RgbImage base = noise_image(160, 120, 77);
  PatchTracker patch({});
  std::vector<Pixel> kp;
  for (int i = 0; i < 8; ++i) kp.push_back({40.0 + 10 * i, 40.0 + 5 * (i % 4)});
  int shifts = 0, exact = 0;
  for (int sx = -16; sx <= 16; ++sx) {
    for (int sy = -16; sy <= 16; ++sy) {
      TrackerState s = patch.init_tracks(image_frame(0, base), kp);
      s = patch.update(s, image_frame(1, shifted(base, sx, sy)));
      bool ok = true;
      for (size_t i = 0; i < kp.size(); ++i) {
        ok = ok && s.points[i].visible && s.points[i].pixel == Pixel{kp[i].u + sx, kp[i].v + sy};
      }
      ++shifts;
      exact += ok;
    }
  }
  o.require(exact == shifts, "patch shifts");
  const double secs = seconds_since(t0);
  o.require(secs < 10.0, "time budget 10 s");
  o.detail << "oracle max err " << worst << " px over " << checked << " points, patch " << exact << "/" << shifts
           << " shifts exact ";
  report(2, "tracker exactness", o, secs);
}

// --- 3 takeover ---------------------------------------------------------------

// Moving -> AwaitBrain pairs with exactly one event; checked on the trace records.
int unpaired_transitions(const EpisodeTrace& tr) {
  int bad = 0;
  std::string prev = "AwaitBrain";
  for (const auto& r : tr.records) {
    const std::string mode = r.value("mode", "");
    const bool from_active = prev == "Moving" || prev == "ExecutingSkill";
    const bool event = r.contains("event");
    if (from_active && mode == "AwaitBrain" && !event) ++bad;
    if (event && !(from_active && (mode == "AwaitBrain" || mode == "Done" || mode == "Failed"))) ++bad;
    prev = mode;
  }
  return bad;
}

void takeover() {
  Outcome o;
  const auto t0 = Clock::now();
  std::ostringstream fired_at;
  for (int k : {1, 5, 10}) {
    LeggedWorld w;
    WorldObject ball;
    ball.id = 1;
    ball.cls = ObjectClass::ball;
    ball.shape = ShapeKind::sphere;
    ball.half_extents = Eigen::Vector3d::Constant(0.12);
    ball.center = {3, 0, 0.12};
    w.objects.push_back(ball);
    Simulator sim(w);
    AdapterConfig cfg;
    cfg.lost_frames = k;
    Adapter a(cfg, Platform::legged, std::make_unique<OracleTracker>(OracleTrackerConfig{}, 1));
    const Observation f0 = sim.observe(0);
    Decision d;
    d.skill = {Platform::legged, Skill::walk};
    d.keypoints = {project(world_to_camera(Point3::from(ball.center), f0.camera), f0.camera)};
    a.on_brain_decision(d, f0);
    WorldObject wall;
    wall.id = 9;
    wall.cls = ObjectClass::obstacle;
    wall.center = {1.0, 0, 0.5};
    wall.half_extents = {0.05, 2.0, 0.5};
    sim.legged()->objects.push_back(wall);
    int fired = -1, events = 0;
    for (int t = 1; t <= 20 && a.state().mode == Mode::moving; ++t) {
      const TickOutput out = a.control_tick(sim.observe(t));
      if (out.event) {
        ++events;
        fired = out.event->cause == TakeoverCause::keypoints_lost ? t : -2;
      }
    }
    fired_at << "K=" << k << "@" << fired << " ";
    o.require(fired == k && events == 1 && a.state().mode == Mode::await_brain, "KeypointsLost at K");
  }

  EpisodeConfig cfg;
  cfg.tracker.oracle.p_drop = 0.2;
  cfg.tracker.oracle.sigma_px = 2.0;
  cfg.max_ticks = 600;
  int unpaired = 0, counted = 0, events = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto& spec = all_tasks()[seed % all_tasks().size()];
    NoisyBrain brain({8.0, 0.3, seed});
    const EpisodeTrace tr = run_episode({spec.id, seed, static_cast<int>(seed % 20), std::nullopt}, brain, cfg);
    unpaired += unpaired_transitions(tr);
    counted += tr.result.mode_violations;
    events += tr.result.takeovers;
  }
  o.require(unpaired == 0 && counted == 0, "fuzzed pairing");
  o.detail << fired_at.str() << "fuzz: " << events << " events, " << unpaired << " unpaired ";
  report(3, "takeover semantics", o, seconds_since(t0));
}

// --- 4-6 batteries --------------------------------------------------------------

BatteryReport battery(Config cfg, const std::string& trace_dir = "", int workers = 0) {
  BatteryOptions opts;
  for (const auto& t : all_tasks()) opts.tasks.push_back(t.id);
  cfg.benchmark.workers = workers;
  opts.config = cfg;
  opts.brain = brain_factory(cfg);
  opts.trace_dir = trace_dir;
  return run_battery(opts);
}

std::map<TaskId, double> rates(const BatteryReport& r) {
  std::map<TaskId, double> m;
  for (const auto& t : r.tasks) m[t.task] = t.rate;
  return m;
}

Config noisy_config() {
  Config cfg;
  cfg.brain.kind = BrainKind::noisy;
  cfg.brain.sigma_px = 5.0;
  cfg.brain.p_wrong_skill = 0.05;
  cfg.episode.tracker.oracle.p_drop = 0.1;
  return cfg;
}

}  // namespace

int main() {
  geometry();
  tracker();
  takeover();

  // 4
  BatteryReport oracle;
  {
    Outcome o;
    const auto t0 = Clock::now();
    oracle = battery(Config{});
    const double secs = seconds_since(t0);
    int perfect = 0;
    for (const auto& t : oracle.tasks) {
      perfect += t.successes == t.trials;
      if (t.successes != t.trials) o.detail << task_spec(t.task).name << " " << t.successes << "/" << t.trials << " ";
      if (is_interaction(t.task)) o.require(t.trials == 20, "interaction trial count");
    }
    o.require(oracle.complete && oracle.tasks.size() == 14 && perfect == 14, "oracle 100%");
    o.require(secs < 300.0, "time budget 5 min");
    o.detail << perfect << "/14 tasks at 100%, " << oracle.trials.size() << " trials ";
    report(4, "oracle battery", o, secs);
  }

  // 5 and 6 share the noisy battery
  const fs::path traces = fs::temp_directory_path() / ("brainloop_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(traces);
  BatteryReport noisy;
  {
    Outcome o;
    const auto t0 = Clock::now();
    noisy = battery(noisy_config(), traces.string(), 1);
    const auto ro = rates(oracle), rn = rates(noisy);
    for (const auto& [task, rate] : rn) {
      if (rate > ro.at(task)) o.detail << task_spec(task).name << " noisy " << rate << " > oracle " << ro.at(task) << " ";
      o.require(rate <= ro.at(task), "noisy <= oracle");
    }
    int cf = 0, cf_lost = 0;
    for (const auto& t : noisy.trials) {
      if (t.task != TaskId::complex_find) continue;
      ++cf;
      cf_lost += t.keypoints_lost > 0;
    }
    o.require(cf > 0 && 2 * cf_lost >= cf, "KeypointsLost in complex_find");
    o.detail << "overall legged " << noisy.overall_legged << " arm " << noisy.overall_arm << ", complex_find KL "
             << cf_lost << "/" << cf << " ";
    report(5, "noisy brain degrades", o, seconds_since(t0));
  }

  {
    Outcome o;
    const auto t0 = Clock::now();
    const BatteryReport again = battery(noisy_config(), "", 0);
    o.require(results_csv(again) == results_csv(noisy), "byte-identical CSV");
    int replayed = 0, diverged = 0;
    for (const auto& entry : fs::directory_iterator(traces)) {
      const ReplayReport rep = replay_trace(entry.path().string());
      ++replayed;
      if (!rep.ok) {
        ++diverged;
        o.detail << entry.path().filename().string() << " diverged at " << rep.divergent_tick << " ";
      }
    }
    o.require(replayed == static_cast<int>(noisy.trials.size()) && diverged == 0, "zero divergence");
    o.detail << "csv " << results_csv(noisy).size() << " bytes identical, " << replayed << " traces replayed, "
             << diverged << " diverged ";
    report(6, "determinism", o, seconds_since(t0));
  }
  fs::remove_all(traces);

  // 7
  {
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> coord(-1e4, 1e4);
    static const std::string alphabet = "abc xyz<>&;/ \n\t()0123456789,._-";
    int round_trips = 0;
    for (int i = 0; i < 1000; ++i) {
      const Platform pl = rng() % 2 ? Platform::legged : Platform::arm;
      const auto pool = skills_for(pl);
      Decision d;
      d.skill = {pl, pool[rng() % pool.size()]};
      for (std::string* s : {&d.observation, &d.plan}) {
        for (int n = static_cast<int>(rng() % 24); n > 0; --n) *s += alphabet[rng() % alphabet.size()];
      }
      for (int k = static_cast<int>(rng() % 5); k > 0; --k) d.keypoints.push_back({coord(rng), coord(rng)});
      const std::string text = serialize_decision(d);
      const Decision back = parse_decision(text, pl);
      round_trips += back.same_content(d) && serialize_decision(back) == text;
    }
    o.require(round_trips == 1000, "round trip");

    const std::vector<std::string> tokens = {"<decision>", "</decision>", "<point>", "</point>", "<skill>",
                                             "</skill>",   "<obs>",       "</obs>",  "<plan>",   "</plan>",
                                             "(",          ")",           ",",       "walk",     "grasp",
                                             "-2.5e3",     "1e999",       "nan",     "&lt;",     " "};
    int parsed = 0, rejected = 0, escaped = 0;
    const std::vector<std::string> seeds = {
        "<decision><point>(12,34)</point><skill>walk</skill></decision>",
        "<obs>x</obs><decision><point>(1.5,2)</point><point>(3,4)</point><skill>grasp</skill></decision>",
        "<decision><skill>sit</skill></decision>"};
    for (int i = 0; i < 1000000; ++i) {
      std::string s;
      if (i % 4 == 0) {
        // a valid block with a few byte edits
        s = seeds[rng() % seeds.size()];
        for (int n = static_cast<int>(rng() % 3); n > 0; --n) {
          const size_t at = rng() % s.size();
          switch (rng() % 3) {
            case 0: s[at] = static_cast<char>(rng() % 256); break;
            case 1: s.erase(at, 1); break;
            default: s.insert(at, 1, static_cast<char>(rng() % 256));
          }
        }
      } else {
        for (int n = static_cast<int>(rng() % 12); n > 0; --n) {
          if (rng() % 4 == 0) {
            s += static_cast<char>(rng() % 256);
          } else {
            s += tokens[rng() % tokens.size()];
          }
        }
      }
      try {
        parse_decision(s, rng() % 2 ? Platform::legged : Platform::arm);
        ++parsed;
      } catch (const ParseError&) {
        ++rejected;
      } catch (...) {
        ++escaped;
      }
    }
    o.require(escaped == 0, "fuzz only raises ParseError");
    o.detail << round_trips << "/1000 round trips, fuzz 10^6: " << parsed << " parsed, " << rejected
             << " rejected, " << escaped << " other ";
    report(7, "decision codec", o, seconds_since(t0));
  }

  // 8
  {
    Outcome o;
    const auto t0 = Clock::now();
    Simulator sim = generate_scene({TaskId::find, 0, 0});
    PatchTracker patch({});
    std::vector<Pixel> kp;
    for (int i = 0; i < 8; ++i) kp.push_back({30.0 + 14 * i, 70.0 + 3 * (i % 3)});
    TrackerState s = patch.init_tracks(sim.observe(0, true), kp);
    std::vector<double> ms;
    for (int t = 1; t <= 300; ++t) {
      const auto tick0 = Clock::now();
      const Observation f = sim.observe(t, true);
      s = patch.update(s, f);
      const VelocityCommand cmd = velocity_command({1.0, 0.1, 0.0}, VelocityLimits{});
      ms.push_back(1000 * seconds_since(tick0));
      sim.step(cmd);
    }
    std::sort(ms.begin(), ms.end());
    double mean = 0;
    for (double v : ms) mean += v / static_cast<double>(ms.size());
    o.require(ms.back() < 66.0, "tick under 66 ms");
    o.detail << "render 160x120 + 8-point patch tracking + command: mean " << mean << " ms, max " << ms.back()
             << " ms over " << ms.size() << " ticks ";
    report(8, "tick budget", o, seconds_since(t0));
  }

  std::printf("%s: %d of 8 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
