#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "brainloop/config.hpp"
#include "brainloop/episode.hpp"
#include "brainloop/errors.hpp"

namespace brainloop {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

}  // namespace

std::string EpisodeTrace::to_ndjson() const {
  std::string out = header.dump() + "\n";
  for (const auto& r : records) out += r.dump() + "\n";
  out += end.dump() + "\n";
  return out;
}

void write_trace(const EpisodeTrace& trace, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << trace.to_ndjson();
}

EpisodeTrace read_trace(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read " + path);
  EpisodeTrace tr;
  std::string line;
  int n = 0;
  while (std::getline(f, line)) {
    ++n;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(path + ":" + std::to_string(n) + ": " + e.what());
    }
    const std::string type = j.value("type", std::string());
    if (type == "header") {
      tr.header = std::move(j);
    } else if (type == "end") {
      tr.end = std::move(j);
    } else {
      tr.records.push_back(std::move(j));
    }
  }
  if (tr.header.is_null()) throw Error(path + ": no header record");
  return tr;
}

ReplayReport replay_trace(const std::string& path) {
  ReplayReport rep;
  // Load line by line so a corrupt record is reported at its tick.
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read " + path);
  json header;
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw Error(path + ": empty trace");
  try {
    header = json::parse(lines.front());
  } catch (const json::parse_error& e) {
    throw Error(path + ": bad header: " + e.what());
  }
  if (header.value("type", std::string()) != "header") throw Error(path + ": first record is not a header");

  const auto task = task_from_string(header.at("task").get<std::string>());
  if (!task) throw Error(path + ": unknown task");
  EpisodeSetup setup;
  setup.task = *task;
  setup.seed = header.at("seed").get<std::uint64_t>();
  setup.trial = header.at("trial").get<int>();
  setup.scene = header.at("scene");
  const EpisodeConfig cfg = episode_config_from_json(header.at("config"));

  std::vector<json> recorded;
  std::vector<ScriptedBrain::Entry> replies;
  for (size_t i = 1; i < lines.size(); ++i) {
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::parse_error&) {
      rep.ok = false;
      rep.divergent_tick = static_cast<std::int64_t>(recorded.size());
      rep.message = "record for tick " + std::to_string(rep.divergent_tick) + " is not valid JSON";
      return rep;
    }
    if (j.value("type", std::string()) == "end") continue;
    if (j.contains("reply")) replies.push_back({j["reply"].get<std::string>(), ""});
    if (j.contains("brain_error")) replies.push_back({std::nullopt, j["brain_error"].get<std::string>()});
    recorded.push_back(std::move(j));
  }

  ScriptedBrain brain(std::move(replies));
  const EpisodeTrace fresh = run_episode(setup, brain, cfg);
  const size_t n = std::max(recorded.size(), fresh.records.size());
  for (size_t i = 0; i < n; ++i) {
    if (i >= recorded.size() || i >= fresh.records.size() || recorded[i] != fresh.records[i]) {
      rep.ok = false;
      rep.divergent_tick = static_cast<std::int64_t>(i);
      if (i < recorded.size() && i < fresh.records.size() && recorded[i].value("hash", "") != fresh.records[i].value("hash", "")) {
        rep.message = "state hash differs at tick " + std::to_string(i);
      } else {
        rep.message = "record differs at tick " + std::to_string(i);
      }
      return rep;
    }
  }
  rep.success = fresh.result.success;
  rep.message = "replayed " + std::to_string(n) + " ticks, no divergence";
  return rep;
}

std::string trajectory_svg(const std::vector<EpisodeTrace>& traces) {
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  auto grow = [&](double x, double y) {
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  };
  for (const auto& tr : traces) {
    for (const auto& r : tr.records) {
      if (r.contains("pose")) grow(r["pose"][0].get<double>(), r["pose"][1].get<double>());
      if (r.contains("wp")) grow(r["wp"][0].get<double>(), r["wp"][1].get<double>());
    }
  }
  if (!(lo_x <= hi_x)) lo_x = lo_y = -1.0, hi_x = hi_y = 1.0;
  const double pad = 0.5;
  lo_x -= pad, lo_y -= pad, hi_x += pad, hi_y += pad;
  const double scale = 600.0 / std::max(hi_x - lo_x, hi_y - lo_y);
  auto sx = [&](double x) { return num((x - lo_x) * scale); };
  auto sy = [&](double y) { return num((hi_y - y) * scale); };  // world y up

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num((hi_x - lo_x) * scale) << "\" height=\""
      << num((hi_y - lo_y) * scale) << "\">\n";
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
  size_t idx = 0;
  for (const auto& tr : traces) {
    const char* color = kColors[idx++ % 6];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& r : tr.records) {
      if (r.contains("pose")) svg << sx(r["pose"][0].get<double>()) << "," << sy(r["pose"][1].get<double>()) << " ";
    }
    svg << "\"/>\n";
    json last_wp;
    for (const auto& r : tr.records) {
      if (r.contains("wp") && r["wp"] != last_wp) {
        last_wp = r["wp"];
        svg << "<circle cx=\"" << sx(last_wp[0].get<double>()) << "\" cy=\"" << sy(last_wp[1].get<double>())
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
      if (r.contains("event") && r.contains("pose")) {
        const std::string x = sx(r["pose"][0].get<double>()), y = sy(r["pose"][1].get<double>());
        svg << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"12\" fill=\"black\">x</text>\n";
      }
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace brainloop
