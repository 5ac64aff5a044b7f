#include "brainloop/episode.hpp"

#include <cstdio>
#include <deque>

#include "brainloop/config.hpp"
#include "brainloop/errors.hpp"
#include "brainloop/hash.hpp"

namespace brainloop {

namespace {

using nlohmann::json;

json command_json(const ControlCommand& cmd) {
  if (const auto* v = std::get_if<VelocityCommand>(&cmd)) return json::array({v->vx, v->vy, v->vyaw});
  if (const auto* g = std::get_if<GraspPose>(&cmd)) {
    return {{"p", {g->position.x, g->position.y, g->position.z}},
            {"yaw", g->yaw},
            {"mode", g->mode == GraspMode::hook ? "hook" : "grasp"}};
  }
  return nullptr;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class EpisodeRunner {
 public:
  EpisodeRunner(const EpisodeSetup& setup, Brain& brain, const EpisodeConfig& cfg)
      : setup_(setup),
        brain_(brain),
        cfg_(cfg),
        sim_(setup.scene ? scene_from_json(*setup.scene) : generate_scene({setup.task, setup.seed, setup.trial})),
        adapter_(cfg.adapter, sim_.platform(), make_tracker(cfg.tracker, mix64(setup.seed + 0x7f))),
        monitor_(setup.task, cfg.success) {
    if (sim_.platform() != task_spec(setup.task).platform) throw ConfigError("scene platform does not match the task");
    trace_.header = {{"type", "header"},
                     {"version", 1},
                     {"task", std::string(task_spec(setup.task).name)},
                     {"seed", setup.seed},
                     {"trial", setup.trial},
                     {"brain", brain.name()},
                     {"config", episode_config_to_json(cfg)},
                     {"scene", scene_to_json(sim_)}};
    auto& r = trace_.result;
    r.task = setup.task;
    r.seed = setup.seed;
    r.trial = setup.trial;
  }

  EpisodeTrace run(const std::atomic<bool>* cancel) {
    std::int64_t t = 0;
    for (; t < cfg_.max_ticks; ++t) {
      if (cancel && cancel->load()) {
        adapter_.finish(false, FailCause::internal_error);
        break;
      }
      json rec{{"t", t}};
      try {
        tick(t, rec);
      } catch (const std::exception& e) {
        rec["internal_error"] = e.what();
        adapter_.finish(false, FailCause::internal_error);
      }
      trace_.records.push_back(std::move(rec));
      const Mode m = adapter_.state().mode;
      if (m == Mode::done || m == Mode::failed) {
        ++t;
        break;
      }
    }
    const Mode m = adapter_.state().mode;
    if (m != Mode::done && m != Mode::failed) adapter_.finish(false, FailCause::timeout);
    auto& r = trace_.result;
    r.ticks = static_cast<int>(t);
    r.success = adapter_.state().mode == Mode::done;
    r.cause = adapter_.state().cause;
    trace_.end = {{"type", "end"},
                  {"success", r.success},
                  {"cause", std::string(to_string(r.cause))},
                  {"ticks", r.ticks},
                  {"takeovers", r.takeovers},
                  {"queries", r.queries}};
    return std::move(trace_);
  }

 private:
  void tick(std::int64_t t, json& rec) {
    ControlCommand cmd;
    const Mode before = adapter_.state().mode;
    if (before == Mode::await_brain) {
      brain_tick(t, rec);
    } else {
      const Observation obs = sim_.observe(t, before == Mode::moving);
      TickOutput out = adapter_.control_tick(obs);
      cmd = out.command;
      if (out.waypoint_world) rec["wp"] = {out.waypoint_world->x, out.waypoint_world->y, out.waypoint_world->z};
      if (out.completed_skill) {
        const SkillOutcome o = sim_.apply_skill(*out.completed_skill);
        rec["skill"] = {{"name", std::string(skill_name(*out.completed_skill))}, {"ok", o.ok}, {"note", o.note}};
      }
      const Mode after = adapter_.state().mode;
      if (out.event) {
        const auto& e = *out.event;
        rec["event"] = {{"cause", std::string(to_string(e.cause))}, {"snapshot", e.snapshot}};
        ++trace_.result.takeovers;
        if (e.cause == TakeoverCause::keypoints_lost) ++trace_.result.keypoints_lost;
        if (!history_.empty()) history_.back().outcome = std::string(to_string(e.cause));
      }
      if ((after == Mode::await_brain) != out.event.has_value()) ++trace_.result.mode_violations;
    }

    sim_.step(cmd);
    rec["cmd"] = command_json(cmd);
    rec["pose"] = sim_.pose_summary();
    rec["hash"] = hex(sim_.state_hash());

    const Mode m = adapter_.state().mode;
    if (m != Mode::done && m != Mode::failed) {
      if (sim_.collided()) {
        adapter_.finish(false, FailCause::collision);
      } else if (monitor_.update(sim_)) {
        adapter_.finish(true);
      }
    }
    rec["mode"] = std::string(to_string(adapter_.state().mode));
  }

  void brain_tick(std::int64_t t, json& rec) {
    if (!pending_) {
      BrainQuery q;
      q.task = setup_.task;
      q.prompt = std::string(task_spec(setup_.task).prompt);
      q.tick = t;
      q.observation = sim_.observe(t, true);
      q.history.assign(history_.begin(), history_.end());
      q.world = std::make_shared<const Simulator>(sim_);
      query_obs_ = q.observation;
      pending_ = brain_.submit(std::move(q));
      due_ = t + cfg_.latency_ticks;
      ++trace_.result.queries;
      rec["query"] = true;
    }
    if (t < due_) return;

    auto fut = std::move(*pending_);
    pending_.reset();
    BrainReply reply;
    try {
      reply = fut.get();
    } catch (const BrainUnavailable& e) {
      rec["brain_error"] = e.what();
      reject(FailCause::brain_unavailable);
      return;
    }
    rec["reply"] = reply.text;
    try {
      Decision d = parse_decision(reply.text, sim_.platform());
      adapter_.on_brain_decision(d, query_obs_);
    } catch (const ParseError& e) {
      rec["reject"] = e.what();
      reject(FailCause::invalid_decision);
      return;
    } catch (const DomainError& e) {
      rec["reject"] = e.what();
      reject(FailCause::invalid_decision);
      return;
    }
    failures_ = 0;
    history_.push_back({t, reply.text, ""});
    while (static_cast<int>(history_.size()) > cfg_.history) history_.pop_front();
  }

  void reject(FailCause cause) {
    if (++failures_ > cfg_.retries) adapter_.finish(false, cause);
  }

  const EpisodeSetup& setup_;
  Brain& brain_;
  const EpisodeConfig& cfg_;
  Simulator sim_;
  Adapter adapter_;
  SuccessMonitor monitor_;
  EpisodeTrace trace_;
  std::optional<std::future<BrainReply>> pending_;
  Observation query_obs_;
  std::int64_t due_ = 0;
  int failures_ = 0;
  std::deque<HistoryEntry> history_;
};

}  // namespace

std::unique_ptr<PointTracker> make_tracker(const TrackerSettings& s, std::uint64_t seed) {
  if (s.kind == TrackerKind::patch) return std::make_unique<PatchTracker>(s.patch);
  return std::make_unique<OracleTracker>(s.oracle, seed);
}

EpisodeTrace run_episode(const EpisodeSetup& setup, Brain& brain, const EpisodeConfig& cfg,
                         const std::atomic<bool>* cancel) {
  EpisodeRunner runner(setup, brain, cfg);
  return runner.run(cancel);
}

}  // namespace brainloop
