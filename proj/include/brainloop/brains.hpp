#pragma once

#include <cstdint>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "brainloop/decision.hpp"
#include "brainloop/scene.hpp"
#include "brainloop/simulator.hpp"
#include "brainloop/task.hpp"

namespace brainloop {

struct HistoryEntry {
  std::int64_t tick = 0;
  std::string decision;  // raw reply text
  std::string outcome;   // takeover cause or error that ended it
};

struct BrainQuery {
  TaskId task = TaskId::find;
  std::string prompt;
  std::int64_t tick = 0;
  Observation observation;
  std::vector<HistoryEntry> history;  // oldest first
  // Privileged snapshot of the world at observation time. Only scripted
  // brains look at it.
  std::shared_ptr<const Simulator> world;
};

struct BrainReply {
  std::string text;
};

// Asynchronous brain boundary. submit() must not touch episode state; the
// future either yields a reply or throws BrainUnavailable.
class Brain {
 public:
  virtual ~Brain() = default;
  virtual std::future<BrainReply> submit(BrainQuery query) = 0;
  virtual std::string name() const = 0;
};

// Task scripts with full world access.
class OracleBrain final : public Brain {
 public:
  std::future<BrainReply> submit(BrainQuery query) override;
  std::string name() const override { return "oracle"; }

  static Decision decide(const BrainQuery& query);
};

struct NoisyBrainConfig {
  double sigma_px = 5.0;
  double p_wrong_skill = 0.05;
  std::uint64_t seed = 0;
};

// Oracle output with Gaussian keypoint noise and random skill swaps. The
// random stream is keyed by (seed, query tick) so replies do not depend on
// scheduling.
class NoisyBrain final : public Brain {
 public:
  explicit NoisyBrain(NoisyBrainConfig cfg);
  std::future<BrainReply> submit(BrainQuery query) override;
  std::string name() const override { return "noisy"; }

  Decision decide(const BrainQuery& query) const;

 private:
  NoisyBrainConfig cfg_;
};

// Plays back recorded replies in order; an entry without text raises
// BrainUnavailable. Used by replay.
class ScriptedBrain final : public Brain {
 public:
  struct Entry {
    std::optional<std::string> text;
    std::string error;
  };
  explicit ScriptedBrain(std::vector<Entry> replies) : replies_(std::move(replies)) {}
  std::future<BrainReply> submit(BrainQuery query) override;
  std::string name() const override { return "scripted"; }

 private:
  std::vector<Entry> replies_;
  size_t next_ = 0;
};

struct RemoteBrainConfig {
  std::string url;  // http://host:port/path
  double timeout_s = 10.0;
};

// JSON over HTTP: POST {prompt, image, history} -> {text}. The image is a
// base64 PNG of the RGB frame.
class RemoteBrain final : public Brain {
 public:
  RemoteBrain(RemoteBrainConfig cfg, TextNormalizer normalizer = default_normalizer);
  std::future<BrainReply> submit(BrainQuery query) override;
  std::string name() const override { return "remote"; }

  // Blocking call used by submit(); public for tests.
  BrainReply call(const BrainQuery& query) const;

 private:
  RemoteBrainConfig cfg_;
  TextNormalizer normalizer_;
};

}  // namespace brainloop
