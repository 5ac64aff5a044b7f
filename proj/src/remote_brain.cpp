#include <regex>

#include "brainloop/brains.hpp"
#include "brainloop/errors.hpp"
#include "brainloop/image_codec.hpp"
#include "httplib.h"
#include "json.hpp"

namespace brainloop {

namespace {

struct Endpoint {
  std::string base;  // scheme://host:port
  std::string path;
};

Endpoint split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw BrainUnavailable("bad brain URL: " + url);
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

}  // namespace

RemoteBrain::RemoteBrain(RemoteBrainConfig cfg, TextNormalizer normalizer)
    : cfg_(std::move(cfg)), normalizer_(std::move(normalizer)) {
  if (cfg_.url.empty()) throw ConfigError("remote brain needs a URL (BRAIN_URL)");
  if (!(cfg_.timeout_s > 0.0)) throw ConfigError("brain timeout must be positive");
}

BrainReply RemoteBrain::call(const BrainQuery& q) const {
  const Endpoint ep = split_url(cfg_.url);
  nlohmann::json body;
  body["prompt"] = q.prompt;
  body["image"] = q.observation.rendered ? base64_encode(encode_png(q.observation.rgb)) : "";
  auto history = nlohmann::json::array();
  for (const auto& h : q.history) history.push_back({{"tick", h.tick}, {"decision", h.decision}, {"outcome", h.outcome}});
  body["history"] = history;

  httplib::Client client(ep.base);
  const auto secs = static_cast<time_t>(cfg_.timeout_s);
  const auto usecs = static_cast<time_t>((cfg_.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  auto res = client.Post(ep.path, body.dump(), "application/json");
  if (!res) throw BrainUnavailable("brain request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw BrainUnavailable("brain answered HTTP " + std::to_string(res->status));
  try {
    const auto reply = nlohmann::json::parse(res->body);
    std::string text = reply.at("text").get<std::string>();
    return {normalizer_ ? normalizer_(text) : text};
  } catch (const nlohmann::json::exception& e) {
    throw BrainUnavailable(std::string("malformed brain reply: ") + e.what());
  }
}

std::future<BrainReply> RemoteBrain::submit(BrainQuery query) {
  return std::async(std::launch::async, [this, q = std::move(query)] { return call(q); });
}

}  // namespace brainloop
