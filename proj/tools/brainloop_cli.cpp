#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "brainloop/benchmark.hpp"
#include "brainloop/config.hpp"
#include "brainloop/errors.hpp"

using namespace brainloop;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kFailed = 1;  // floors missed or episode failed
constexpr int kUsage = 2;   // bad config or arguments
constexpr int kDiverged = 3;

std::atomic<bool> g_cancel{false};

extern "C" void on_sigint(int) { g_cancel.store(true); }

std::string valid_ids() {
  std::string s = "legged, arm, all";
  for (const auto& t : all_tasks()) s += ", " + std::string(t.name);
  return s;
}

std::vector<TaskId> parse_tasks(const std::string& list) {
  std::vector<TaskId> out;
  auto add = [&](TaskId id) {
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  };
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "all" || item == "legged" || item == "arm") {
      for (const auto& t : all_tasks()) {
        if (item == "all" || (item == "legged") == (t.platform == Platform::legged)) add(t.id);
      }
    } else if (auto id = task_from_string(item)) {
      add(*id);
    } else {
      throw ConfigError("unknown task '" + item + "'; valid ids: " + valid_ids());
    }
  }
  if (out.empty()) throw ConfigError("no tasks selected; valid ids: " + valid_ids());
  return out;
}

struct Common {
  std::string config_path;
  std::string brain;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "JSON config file");
  cmd->add_option("--brain", c.brain, "Brain override: oracle, noisy or remote");
  cmd->add_option("--seed", c.seed, "Base seed override");
}

// File values first, then flags, then environment for the remote brain.
Config resolve(const Common& c) {
  Config cfg = c.config_path.empty() ? Config{} : load_config(c.config_path);
  if (!c.brain.empty()) {
    nlohmann::json j = config_to_json(cfg);
    j["brain"]["kind"] = c.brain;
    cfg = config_from_json(j);
  }
  if (c.seed) cfg.seed = *c.seed;
  if (const char* url = std::getenv("BRAIN_URL")) cfg.brain.url = url;
  if (const char* t = std::getenv("BRAIN_TIMEOUT_S")) {
    try {
      cfg.brain.timeout_s = std::stod(t);
    } catch (const std::exception&) {
      throw ConfigError(std::string("BRAIN_TIMEOUT_S is not a number: ") + t);
    }
  }
  if (cfg.brain.kind == BrainKind::remote && cfg.brain.url.empty()) {
    throw ConfigError("--brain remote needs BRAIN_URL to be set");
  }
  validate(cfg);
  return cfg;
}

int cmd_bench(const Common& c, const std::string& tasks, const std::string& out_dir, const std::string& trace_dir,
              int workers) {
  Config cfg = resolve(c);
  if (workers > 0) cfg.benchmark.workers = workers;
  BatteryOptions opts;
  opts.tasks = parse_tasks(tasks);
  opts.config = cfg;
  opts.brain = brain_factory(cfg);
  opts.cancel = &g_cancel;
  if (!trace_dir.empty()) {
    std::filesystem::create_directories(trace_dir);
    opts.trace_dir = trace_dir;
  }
  opts.progress = [](const EpisodeResult& r) {
    std::cout << task_spec(r.task).name << " seed=" << r.seed << " " << (r.success ? "ok" : "FAIL") << " "
              << to_string(r.cause) << " ticks=" << r.ticks << "\n"
              << std::flush;
  };
  std::signal(SIGINT, on_sigint);
  const BatteryReport rep = run_battery(opts);
  write_reports(rep, cfg, out_dir);
  std::cout << report_markdown(rep, cfg);
  if (!rep.complete) {
    std::cerr << "interrupted; partial reports written to " << out_dir << "\n";
    return kFailed;
  }
  return rep.floors_met ? kOk : kFailed;
}

int cmd_episode(const Common& c, const std::string& task, int trial, const std::string& scene_path,
                const std::string& trace_path) {
  const Config cfg = resolve(c);
  const auto id = task_from_string(task);
  if (!id) throw ConfigError("unknown task '" + task + "'; valid ids: " + valid_ids());
  EpisodeSetup setup{*id, cfg.seed, trial, std::nullopt};
  if (!scene_path.empty()) {
    std::ifstream f(scene_path);
    if (!f) throw ConfigError("cannot read " + scene_path);
    try {
      setup.scene = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(scene_path + ": " + e.what());
    }
  }
  auto brain = brain_factory(cfg)(*id, cfg.seed);
  std::signal(SIGINT, on_sigint);
  const EpisodeTrace tr = run_episode(setup, *brain, cfg.episode, &g_cancel);
  if (!trace_path.empty()) write_trace(tr, trace_path);
  std::cout << tr.end.dump() << "\n";
  return tr.result.success ? kOk : kFailed;
}

int cmd_replay(const std::vector<std::string>& paths, const std::string& plot) {
  int code = kOk;
  std::vector<EpisodeTrace> traces;
  for (const auto& p : paths) {
    const ReplayReport rep = replay_trace(p);
    std::cout << p << ": " << rep.message << "\n";
    if (!rep.ok) {
      std::cerr << p << ": first divergent tick " << rep.divergent_tick << "\n";
      code = kDiverged;
    }
    if (!plot.empty()) traces.push_back(read_trace(p));
  }
  if (!plot.empty()) {
    std::ofstream f(plot);
    if (!f) throw Error("cannot write " + plot);
    f << trajectory_svg(traces);
  }
  return code;
}

int cmd_validate(const std::string& path) {
  const Config cfg = load_config(path);
  // A config must survive its own round trip.
  if (config_to_json(config_from_json(config_to_json(cfg))) != config_to_json(cfg)) {
    throw ConfigError("config does not round-trip");
  }
  std::cout << path << ": ok\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"brainloop: closed-loop brain + robotic adapter benchmark", "brainloop"};
  app.require_subcommand(1);

  Common common;
  std::string tasks = "all", out_dir = "results", trace_dir, task, scene, trace_out, plot, cfg_path;
  int workers = 0, trial = 0;
  std::vector<std::string> traces;

  auto* bench = app.add_subcommand("bench", "Run a task battery and write results.csv, results.json, report.md");
  add_common(bench, common);
  bench->add_option("--tasks", tasks, "Comma list of task ids, or legged, arm, all")->capture_default_str();
  bench->add_option("-o,--out", out_dir, "Report directory")->capture_default_str();
  bench->add_option("--traces", trace_dir, "Directory for per-trial NDJSON traces");
  bench->add_option("-j,--workers", workers, "Worker threads (0 = config or hardware)");

  auto* episode = app.add_subcommand("episode", "Run one episode and print its end record");
  add_common(episode, common);
  episode->add_option("-t,--task", task, "Task id")->required();
  episode->add_option("--trial", trial, "Trial index (picks the gesture in interaction tasks)");
  episode->add_option("--scene", scene, "Scene JSON replacing the generated layout");
  episode->add_option("--trace", trace_out, "Write the NDJSON trace here");

  auto* replay = app.add_subcommand("replay", "Re-execute traces and check per-tick state hashes");
  replay->add_option("traces", traces, "Trace files")->required();
  replay->add_option("--plot", plot, "Write a trajectory SVG");

  auto* validate_cmd = app.add_subcommand("validate-config", "Check a config file");
  validate_cmd->add_option("config", cfg_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    // Top-level help lists every subcommand with its flags.
    std::cout << app.help("", app.get_subcommands().empty() ? CLI::AppFormatMode::All : CLI::AppFormatMode::Normal);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*bench) return cmd_bench(common, tasks, out_dir, trace_dir, workers);
    if (*episode) return cmd_episode(common, task, trial, scene, trace_out);
    if (*replay) return cmd_replay(traces, plot);
    if (*validate_cmd) return cmd_validate(cfg_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
