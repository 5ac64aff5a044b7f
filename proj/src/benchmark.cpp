#include "brainloop/benchmark.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "brainloop/errors.hpp"

namespace brainloop {

namespace {

std::string pct(double rate) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", rate * 100.0);
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
}

}  // namespace

BrainFactory brain_factory(const Config& cfg) {
  const BrainSettings b = cfg.brain;
  switch (b.kind) {
    case BrainKind::oracle:
      return [](TaskId, std::uint64_t) { return std::make_unique<OracleBrain>(); };
    case BrainKind::noisy:
      return [b](TaskId task, std::uint64_t seed) {
        return std::make_unique<NoisyBrain>(
            NoisyBrainConfig{b.sigma_px, b.p_wrong_skill, seed * 1000003ULL + static_cast<std::uint64_t>(task)});
      };
    case BrainKind::remote:
      return [b](TaskId, std::uint64_t) {
        return std::make_unique<RemoteBrain>(RemoteBrainConfig{b.url, b.timeout_s});
      };
  }
  throw ConfigError("unknown brain kind");
}

std::string trace_filename(const EpisodeResult& r) {
  return std::string(task_spec(r.task).name) + "_" + std::to_string(r.seed) + ".ndjson";
}

BatteryReport run_battery(const BatteryOptions& opts) {
  struct Job {
    TaskId task;
    int trial;
  };
  std::vector<Job> jobs;
  for (TaskId t : opts.tasks) {
    for (int i = 0; i < task_spec(t).trials; ++i) jobs.push_back({t, i});
  }

  BatteryReport report;
  report.trials.resize(jobs.size());
  std::vector<bool> ran(jobs.size(), false);
  std::atomic<size_t> next{0};
  std::mutex mu;
  const Config& cfg = opts.config;

  auto worker = [&] {
    for (;;) {
      if (opts.cancel && opts.cancel->load()) return;
      const size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(job.trial);
      EpisodeResult res;
      res.task = job.task;
      res.seed = seed;
      res.trial = job.trial;
      try {
        auto brain = opts.brain(job.task, seed);
        EpisodeTrace tr = run_episode({job.task, seed, job.trial, std::nullopt}, *brain, cfg.episode, opts.cancel);
        res = tr.result;
        if (!opts.trace_dir.empty()) write_trace(tr, (std::filesystem::path(opts.trace_dir) / trace_filename(res)).string());
      } catch (const std::exception&) {
        res.success = false;
        res.cause = FailCause::internal_error;
      }
      if (opts.cancel && opts.cancel->load()) return;  // partial episode, drop it
      std::lock_guard lock(mu);
      report.trials[i] = res;
      ran[i] = true;
      if (opts.progress) opts.progress(res);
    }
  };

  int n = cfg.benchmark.workers > 0 ? cfg.benchmark.workers : static_cast<int>(std::thread::hardware_concurrency());
  n = std::clamp(n, 1, std::max(1, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::vector<EpisodeResult> done;
  for (size_t i = 0; i < jobs.size(); ++i) {
    if (ran[i]) done.push_back(report.trials[i]);
  }
  report.complete = done.size() == jobs.size();
  report.trials = std::move(done);

  double sum[2] = {0, 0};
  int count[2] = {0, 0};
  for (TaskId t : opts.tasks) {
    TaskSummary s;
    s.task = t;
    for (const auto& r : report.trials) {
      if (r.task != t) continue;
      ++s.trials;
      s.successes += r.success ? 1 : 0;
    }
    if (s.trials == 0) continue;
    s.rate = static_cast<double>(s.successes) / s.trials;
    const auto name = std::string(task_spec(t).name);
    auto it = cfg.benchmark.floors.find(name);
    s.floor = it != cfg.benchmark.floors.end() ? it->second : cfg.benchmark.floor;
    if (s.rate + 1e-12 < s.floor) report.floors_met = false;
    const int p = task_spec(t).platform == Platform::legged ? 0 : 1;
    sum[p] += s.rate;
    ++count[p];
    report.tasks.push_back(s);
  }
  if (count[0]) report.overall_legged = sum[0] / count[0];
  if (count[1]) report.overall_arm = sum[1] / count[1];
  return report;
}

std::vector<ReferenceRow> reference_rows() {
  return {
      {"published real-robot reference (not reproduced)", Platform::legged, {1.0, 1.0, 0.9, 0.8, 0.85, 0.9, 0.6}, 0.864},
      {"published real-robot reference (not reproduced)", Platform::arm, {0.7, 0.7, 0.9, 0.6, 0.9, 0.6, 0.8}, 0.743},
  };
}

std::string results_csv(const BatteryReport& r) {
  std::ostringstream out;
  out << "task,seed,success,cause,ticks,takeovers\n";
  for (const auto& t : r.trials) {
    out << task_spec(t.task).name << "," << t.seed << "," << (t.success ? 1 : 0) << "," << to_string(t.cause) << ","
        << t.ticks << "," << t.takeovers << "\n";
  }
  return out.str();
}

nlohmann::json results_json(const BatteryReport& r, const Config& cfg) {
  using nlohmann::json;
  json trials = json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"task", std::string(task_spec(t.task).name)},
                      {"seed", t.seed},
                      {"trial", t.trial},
                      {"success", t.success},
                      {"cause", std::string(to_string(t.cause))},
                      {"ticks", t.ticks},
                      {"takeovers", t.takeovers},
                      {"keypoints_lost", t.keypoints_lost},
                      {"queries", t.queries}});
  }
  json tasks = json::array();
  for (const auto& s : r.tasks) {
    tasks.push_back({{"task", std::string(task_spec(s.task).name)},
                     {"platform", std::string(to_string(task_spec(s.task).platform))},
                     {"difficulty", std::string(to_string(task_spec(s.task).difficulty))},
                     {"trials", s.trials},
                     {"successes", s.successes},
                     {"rate", s.rate},
                     {"floor", s.floor}});
  }
  json refs = json::array();
  for (const auto& row : reference_rows()) {
    refs.push_back({{"label", row.label},
                    {"platform", std::string(to_string(row.platform))},
                    {"rates", row.rates},
                    {"overall", row.overall}});
  }
  json out{{"config", config_to_json(cfg)}, {"complete", r.complete}, {"floors_met", r.floors_met},
           {"tasks", tasks},    {"trials", trials},           {"reference", refs}};
  if (r.overall_legged >= 0.0) out["overall_legged"] = r.overall_legged;
  if (r.overall_arm >= 0.0) out["overall_arm"] = r.overall_arm;
  return out;
}

std::string report_markdown(const BatteryReport& r, const Config& cfg) {
  std::ostringstream md;
  md << "# Benchmark report\n\n";
  md << "brain: " << to_string(cfg.brain.kind) << ", tracker: " << to_string(cfg.episode.tracker.kind)
     << " (sigma " << cfg.episode.tracker.oracle.sigma_px << " px, drop " << cfg.episode.tracker.oracle.p_drop
     << "), base seed " << cfg.seed << (r.complete ? "" : ", INCOMPLETE (interrupted)") << "\n\n";
  const auto& s = cfg.episode.success;
  md << "Thresholds: find " << s.find_radius << " m, interaction " << s.interaction_radius << " m, track "
     << s.track_radius << " m for " << s.track_seconds << " s, drawer open >= " << s.drawer_open
     << ", reach radius " << cfg.episode.adapter.reach_radius << " m, K = " << cfg.episode.adapter.lost_frames
     << " frames.\n\n";

  for (Platform p : {Platform::legged, Platform::arm}) {
    std::vector<const TaskSummary*> rows;
    for (const auto& t : r.tasks) {
      if (task_spec(t.task).platform == p) rows.push_back(&t);
    }
    if (rows.empty()) continue;
    md << "## " << (p == Platform::legged ? "Legged robot" : "Robot arm") << "\n\n| row |";
    for (const auto* t : rows) md << " " << task_spec(t->task).name << " |";
    md << " overall |\n|---|";
    for (size_t i = 0; i <= rows.size(); ++i) md << "---|";
    md << "\n| this run |";
    for (const auto* t : rows) md << " " << pct(t->rate) << " (" << t->successes << "/" << t->trials << ") |";
    md << " " << pct(p == Platform::legged ? r.overall_legged : r.overall_arm) << " |\n";
    for (const auto& ref : reference_rows()) {
      if (ref.platform != p) continue;
      md << "| " << ref.label << " |";
      for (const auto* t : rows) {
        const size_t base = p == Platform::legged ? 0 : static_cast<size_t>(TaskId::banana_in);
        md << " " << pct(ref.rates[static_cast<size_t>(t->task) - base]) << " |";
      }
      md << " " << pct(ref.overall) << " |\n";
    }
    md << "\n";
  }
  md << "Floors " << (r.floors_met ? "met" : "NOT met") << ".\n";
  return md.str();
}

void write_reports(const BatteryReport& r, const Config& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_file(dir / "results.csv", results_csv(r));
  write_file(dir / "results.json", results_json(r, cfg).dump(2) + "\n");
  write_file(dir / "report.md", report_markdown(r, cfg));
}

}  // namespace brainloop
