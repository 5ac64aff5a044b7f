#include "brainloop/config.hpp"

#include <fstream>
#include <set>

#include "brainloop/errors.hpp"

namespace brainloop {

namespace {

using nlohmann::json;

// Reads the keys of one JSON object and rejects whatever was not asked for.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError(name_ + " must be an object");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(name_ + "." + key + " has the wrong type");
    }
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.contains(k)) throw ConfigError("unknown key " + name_ + "." + k);
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

void range(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

TrackerKind tracker_kind(const std::string& s) {
  if (s == "oracle") return TrackerKind::oracle;
  if (s == "patch") return TrackerKind::patch;
  throw ConfigError("tracker.kind must be oracle or patch");
}

BrainKind brain_kind(const std::string& s) {
  if (s == "oracle") return BrainKind::oracle;
  if (s == "noisy") return BrainKind::noisy;
  if (s == "remote") return BrainKind::remote;
  throw ConfigError("brain.kind must be oracle, noisy or remote");
}

void read_episode(const json& j, EpisodeConfig& e, std::set<std::string>& handled) {
  if (j.contains("geometry")) {
    handled.insert("geometry");
    Section s(j["geometry"], "geometry");
    s.get("gain", e.adapter.limits.gain);
    s.get("v_max", e.adapter.limits.v_max);
    s.get("yaw_max", e.adapter.limits.yaw_max);
    s.get("eps_v", e.adapter.limits.eps_v);
    s.get("fill_radius", e.adapter.fill_radius);
    s.finish();
  }
  if (j.contains("tracker")) {
    handled.insert("tracker");
    Section s(j["tracker"], "tracker");
    std::string kind(to_string(e.tracker.kind));
    s.get("kind", kind);
    e.tracker.kind = tracker_kind(kind);
    s.get("sigma_px", e.tracker.oracle.sigma_px);
    s.get("p_drop", e.tracker.oracle.p_drop);
    s.get("occlusion_margin", e.tracker.oracle.occlusion_margin);
    s.get("lost_frames", e.adapter.lost_frames);
    std::string policy = e.adapter.lost_policy == LostPolicy::all ? "all" : "any";
    s.get("lost_policy", policy);
    if (policy != "all" && policy != "any") throw ConfigError("tracker.lost_policy must be all or any");
    e.adapter.lost_policy = policy == "all" ? LostPolicy::all : LostPolicy::any;
    s.get("patch_size", e.tracker.patch.patch_size);
    s.get("search_radius", e.tracker.patch.search_radius);
    s.get("ncc_threshold", e.tracker.patch.ncc_threshold);
    s.finish();
  }
  if (j.contains("adapter")) {
    handled.insert("adapter");
    Section s(j["adapter"], "adapter");
    s.get("reach_radius", e.adapter.reach_radius);
    s.get("latency_ticks", e.latency_ticks);
    s.get("max_ticks", e.max_ticks);
    s.get("retries", e.retries);
    s.get("history", e.history);
    if (const json* t = s.child("skill_ticks")) {
      Section st(*t, "adapter.skill_ticks");
      for (size_t i = 0; i < kSkillCount; ++i) st.get(std::string(skill_name(static_cast<Skill>(i))), e.adapter.skill_ticks[i]);
      st.finish();
    }
    s.finish();
  }
}

json episode_sections(const EpisodeConfig& e) {
  json skill_ticks = json::object();
  for (size_t i = 0; i < kSkillCount; ++i) skill_ticks[std::string(skill_name(static_cast<Skill>(i)))] = e.adapter.skill_ticks[i];
  return {
      {"geometry",
       {{"gain", e.adapter.limits.gain},
        {"v_max", e.adapter.limits.v_max},
        {"yaw_max", e.adapter.limits.yaw_max},
        {"eps_v", e.adapter.limits.eps_v},
        {"fill_radius", e.adapter.fill_radius}}},
      {"tracker",
       {{"kind", std::string(to_string(e.tracker.kind))},
        {"sigma_px", e.tracker.oracle.sigma_px},
        {"p_drop", e.tracker.oracle.p_drop},
        {"occlusion_margin", e.tracker.oracle.occlusion_margin},
        {"lost_frames", e.adapter.lost_frames},
        {"lost_policy", e.adapter.lost_policy == LostPolicy::all ? "all" : "any"},
        {"patch_size", e.tracker.patch.patch_size},
        {"search_radius", e.tracker.patch.search_radius},
        {"ncc_threshold", e.tracker.patch.ncc_threshold}}},
      {"adapter",
       {{"reach_radius", e.adapter.reach_radius},
        {"latency_ticks", e.latency_ticks},
        {"max_ticks", e.max_ticks},
        {"retries", e.retries},
        {"history", e.history},
        {"skill_ticks", skill_ticks}}},
  };
}

void read_success(Section& s, SuccessConfig& c) {
  s.get("find_radius", c.find_radius);
  s.get("interaction_radius", c.interaction_radius);
  s.get("track_radius", c.track_radius);
  s.get("track_seconds", c.track_seconds);
  s.get("drawer_open", c.drawer_open);
}

json success_json(const SuccessConfig& c) {
  return {{"find_radius", c.find_radius},
          {"interaction_radius", c.interaction_radius},
          {"track_radius", c.track_radius},
          {"track_seconds", c.track_seconds},
          {"drawer_open", c.drawer_open}};
}

void validate_episode(const EpisodeConfig& e) {
  const auto& l = e.adapter.limits;
  range(l.gain > 0.0 && l.gain <= 10.0, "geometry.gain must be in (0, 10]");
  range(l.v_max > 0.0 && l.v_max <= 5.0, "geometry.v_max must be in (0, 5]");
  range(l.yaw_max > 0.0 && l.yaw_max <= 3.2, "geometry.yaw_max must be in (0, 3.2]");
  range(l.eps_v > 0.0 && l.eps_v < 0.1, "geometry.eps_v must be in (0, 0.1)");
  range(e.adapter.fill_radius >= 0 && e.adapter.fill_radius <= 20, "geometry.fill_radius must be in [0, 20]");
  range(e.tracker.oracle.sigma_px >= 0.0 && e.tracker.oracle.sigma_px <= 50.0, "tracker.sigma_px must be in [0, 50]");
  range(e.tracker.oracle.p_drop >= 0.0 && e.tracker.oracle.p_drop < 1.0, "tracker.p_drop must be in [0, 1)");
  range(e.tracker.oracle.occlusion_margin >= 0.0 && e.tracker.oracle.occlusion_margin <= 0.5,
        "tracker.occlusion_margin must be in [0, 0.5]");
  range(e.adapter.lost_frames >= 1 && e.adapter.lost_frames <= 1000, "tracker.lost_frames must be in [1, 1000]");
  range(e.tracker.patch.patch_size >= 3 && e.tracker.patch.patch_size % 2 == 1 && e.tracker.patch.patch_size <= 31,
        "tracker.patch_size must be odd and in [3, 31]");
  range(e.tracker.patch.search_radius >= 1 && e.tracker.patch.search_radius <= 64, "tracker.search_radius must be in [1, 64]");
  range(e.tracker.patch.ncc_threshold >= -1.0 && e.tracker.patch.ncc_threshold <= 1.0,
        "tracker.ncc_threshold must be in [-1, 1]");
  range(e.adapter.reach_radius > 0.0 && e.adapter.reach_radius <= 2.0, "adapter.reach_radius must be in (0, 2]");
  range(e.latency_ticks >= 0 && e.latency_ticks <= 600, "adapter.latency_ticks must be in [0, 600]");
  range(e.max_ticks >= 1 && e.max_ticks <= 100000, "adapter.max_ticks must be in [1, 100000]");
  range(e.retries >= 0 && e.retries <= 20, "adapter.retries must be in [0, 20]");
  range(e.history >= 0 && e.history <= 64, "adapter.history must be in [0, 64]");
  for (size_t i = 0; i < kSkillCount; ++i) {
    range(e.adapter.skill_ticks[i] >= 1 && e.adapter.skill_ticks[i] <= 1000, "adapter.skill_ticks entries must be in [1, 1000]");
  }
  const auto& s = e.success;
  range(s.find_radius > 0.0, "benchmark.find_radius must be positive");
  range(s.interaction_radius > 0.0, "benchmark.interaction_radius must be positive");
  range(s.track_radius > 0.0, "benchmark.track_radius must be positive");
  range(s.track_seconds > 0.0 && s.track_seconds <= 60.0, "benchmark.track_seconds must be in (0, 60]");
  range(s.drawer_open > 0.5 && s.drawer_open <= 1.0, "benchmark.drawer_open must be in (0.5, 1]");
}

}  // namespace

std::string_view to_string(BrainKind k) {
  switch (k) {
    case BrainKind::oracle: return "oracle";
    case BrainKind::noisy: return "noisy";
    case BrainKind::remote: return "remote";
  }
  return "";
}

std::string_view to_string(TrackerKind k) { return k == TrackerKind::oracle ? "oracle" : "patch"; }

Config config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  Config c;
  std::set<std::string> handled;
  read_episode(j, c.episode, handled);
  Section top(j, "config");
  for (const auto& k : handled) top.child(k);
  top.get("seed", c.seed);
  if (const json* b = top.child("brain")) {
    Section s(*b, "brain");
    std::string kind(to_string(c.brain.kind));
    s.get("kind", kind);
    c.brain.kind = brain_kind(kind);
    s.get("sigma_px", c.brain.sigma_px);
    s.get("p_wrong_skill", c.brain.p_wrong_skill);
    s.get("url", c.brain.url);
    s.get("timeout_s", c.brain.timeout_s);
    s.finish();
  }
  if (const json* b = top.child("benchmark")) {
    Section s(*b, "benchmark");
    read_success(s, c.episode.success);
    s.get("floor", c.benchmark.floor);
    s.get("floors", c.benchmark.floors);
    s.get("workers", c.benchmark.workers);
    s.finish();
  }
  top.finish();
  validate(c);
  return c;
}

json config_to_json(const Config& c) {
  json j = episode_sections(c.episode);
  j["brain"] = {{"kind", std::string(to_string(c.brain.kind))},
                {"sigma_px", c.brain.sigma_px},
                {"p_wrong_skill", c.brain.p_wrong_skill},
                {"url", c.brain.url},
                {"timeout_s", c.brain.timeout_s}};
  json bench = success_json(c.episode.success);
  bench["floor"] = c.benchmark.floor;
  bench["floors"] = c.benchmark.floors;
  bench["workers"] = c.benchmark.workers;
  j["benchmark"] = bench;
  j["seed"] = c.seed;
  return j;
}

Config load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(j);
}

void validate(const Config& c) {
  validate_episode(c.episode);
  range(c.brain.sigma_px >= 0.0 && c.brain.sigma_px <= 100.0, "brain.sigma_px must be in [0, 100]");
  range(c.brain.p_wrong_skill >= 0.0 && c.brain.p_wrong_skill <= 1.0, "brain.p_wrong_skill must be in [0, 1]");
  range(c.brain.timeout_s > 0.0 && c.brain.timeout_s <= 600.0, "brain.timeout_s must be in (0, 600]");
  range(c.benchmark.floor >= 0.0 && c.benchmark.floor <= 1.0, "benchmark.floor must be in [0, 1]");
  for (const auto& [task, f] : c.benchmark.floors) {
    if (!task_from_string(task)) throw ConfigError("benchmark.floors: unknown task " + task);
    range(f >= 0.0 && f <= 1.0, "benchmark.floors values must be in [0, 1]");
  }
  range(c.benchmark.workers >= 0 && c.benchmark.workers <= 256, "benchmark.workers must be in [0, 256]");
}

json episode_config_to_json(const EpisodeConfig& e) {
  json j = episode_sections(e);
  j["success"] = success_json(e.success);
  return j;
}

EpisodeConfig episode_config_from_json(const json& j) {
  EpisodeConfig e;
  std::set<std::string> handled;
  read_episode(j, e, handled);
  Section top(j, "episode");
  for (const auto& k : handled) top.child(k);
  if (const json* s = top.child("success")) {
    Section sec(*s, "success");
    read_success(sec, e.success);
    sec.finish();
  }
  top.finish();
  validate_episode(e);
  return e;
}

}  // namespace brainloop
