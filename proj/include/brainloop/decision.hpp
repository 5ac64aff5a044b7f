#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "brainloop/geometry.hpp"

namespace brainloop {

enum class Platform { legged, arm };

enum class Skill {
  // legged
  dump,
  touch,
  shake,
  jump,
  scrape,
  squat,
  heart,
  turn_right,
  turn_left,
  sit,
  wallow,
  lie_down,
  stand_up,
  stretch,
  walk,
  // arm
  grasp,
  release,
  pull,
};

struct SkillId {
  Platform platform = Platform::legged;
  Skill skill = Skill::walk;

  friend bool operator==(const SkillId&, const SkillId&) = default;
};

std::string_view to_string(Platform p);
std::optional<Platform> platform_from_string(std::string_view s);
std::string_view skill_name(Skill s);

struct PolicyEntry {
  Platform platform;
  Skill skill;
  std::string_view description;
};

// The policy pool: every (platform, skill) pair a brain may request.
std::span<const PolicyEntry> policy_pool();
std::vector<Skill> skills_for(Platform platform);
bool in_policy_pool(const SkillId& id);

// Throws UnknownSkill unless (platform, name) is in the policy pool.
SkillId validate_skill(std::string_view name, Platform platform);

struct Decision {
  std::string observation;
  std::string plan;
  std::vector<Pixel> keypoints;
  SkillId skill;
  std::string raw_text;

  // Equality on everything except raw_text.
  bool same_content(const Decision& other) const;
};

// Grammar of one decision block (whitespace between tokens is ignored):
//
//   [<obs>TEXT</obs>] [<plan>TEXT</plan>]
//   <decision> (<point>(FLOAT,FLOAT)</point>)* <skill>IDENT</skill> </decision>
//
// TEXT escapes '&', '<' and '>' as &amp; &lt; &gt;. When several blocks are
// present the last well-formed one wins.
Decision parse_decision(std::string_view text, Platform platform);

std::string serialize_decision(const Decision& d);

// Text rewrite applied to raw model output before parsing. The default
// accepts bracketed points "[u, v]" and skill names with capitals, spaces
// or hyphens ("Turn Left").
using TextNormalizer = std::function<std::string(std::string_view)>;
std::string default_normalizer(std::string_view text);

}  // namespace brainloop
