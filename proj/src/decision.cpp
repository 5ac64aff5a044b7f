#include "brainloop/decision.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <regex>

#include "brainloop/errors.hpp"

namespace brainloop {

namespace {

constexpr std::array<PolicyEntry, 18> kPolicyPool{{
    {Platform::legged, Skill::dump, "empty the basket"},
    {Platform::legged, Skill::touch, "lower the head to be patted"},
    {Platform::legged, Skill::shake, "offer a paw"},
    {Platform::legged, Skill::jump, "hop forward"},
    {Platform::legged, Skill::scrape, "rear up and scrape"},
    {Platform::legged, Skill::squat, "drop body height"},
    {Platform::legged, Skill::heart, "rear up and draw a heart"},
    {Platform::legged, Skill::turn_right, "quarter turn clockwise"},
    {Platform::legged, Skill::turn_left, "quarter turn counter-clockwise"},
    {Platform::legged, Skill::sit, "sit"},
    {Platform::legged, Skill::wallow, "roll side to side"},
    {Platform::legged, Skill::lie_down, "lie flat"},
    {Platform::legged, Skill::stand_up, "return to standing"},
    {Platform::legged, Skill::stretch, "stretch"},
    {Platform::legged, Skill::walk, "walk to the keypoints, no stunt"},
    {Platform::arm, Skill::grasp, "close the gripper on the item"},
    {Platform::arm, Skill::release, "open the gripper"},
    {Platform::arm, Skill::pull, "pull along the handle direction"},
}};

constexpr std::array<std::string_view, 18> kSkillNames{
    "dump",  "touch",     "shake",   "jump",     "scrape",   "squat",
    "heart", "turn_right", "turn_left", "sit",   "wallow",   "lie_down",
    "stand_up", "stretch", "walk",   "grasp",    "release",  "pull",
};

// ---------------------------------------------------------------------------
// Text helpers

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size();) {
    if (s[i] == '&') {
      auto rest = s.substr(i);
      if (rest.starts_with("&amp;")) { out += '&'; i += 5; continue; }
      if (rest.starts_with("&lt;")) { out += '<'; i += 4; continue; }
      if (rest.starts_with("&gt;")) { out += '>'; i += 4; continue; }
    }
    out += s[i++];
  }
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

// Cursor over one decision block body.
class BlockScanner {
 public:
  explicit BlockScanner(std::string_view body) : s_(body) {}

  void skip_ws() {
    while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  bool consume(std::string_view lit) {
    if (s_.substr(pos_).starts_with(lit)) {
      pos_ += lit.size();
      return true;
    }
    return false;
  }
  double number() {
    skip_ws();
    size_t p = pos_;
    bool negative = false;
    if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) {
      negative = s_[p] == '-';
      ++p;
    }
    if (p >= s_.size() || !(std::isdigit(static_cast<unsigned char>(s_[p])) || s_[p] == '.')) {
      throw MalformedPoint("expected a number in <point>");
    }
    double value = 0.0;
    auto [end, ec] = std::from_chars(s_.data() + p, s_.data() + s_.size(), value,
                                     std::chars_format::general);
    if (ec != std::errc() || !std::isfinite(value)) throw MalformedPoint("bad number in <point>");
    pos_ = static_cast<size_t>(end - s_.data());
    return negative ? -value : value;
  }

  std::optional<std::string_view> until(std::string_view closing) {
    const size_t e = s_.find(closing, pos_);
    if (e == std::string_view::npos) return std::nullopt;
    auto out = s_.substr(pos_, e - pos_);
    pos_ = e + closing.size();
    return out;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;
};

struct RawBlock {
  std::vector<Pixel> keypoints;
  std::string skill_name;
};

RawBlock parse_block(std::string_view body) {
  BlockScanner sc(body);
  RawBlock out;
  sc.skip_ws();
  while (sc.consume("<point>")) {
    sc.skip_ws();
    if (!sc.consume("(")) throw MalformedPoint("expected '(' in <point>");
    const double u = sc.number();
    sc.skip_ws();
    if (!sc.consume(",")) throw MalformedPoint("expected ',' in <point>");
    const double v = sc.number();
    sc.skip_ws();
    if (!sc.consume(")")) throw MalformedPoint("expected ')' in <point>");
    sc.skip_ws();
    if (!sc.consume("</point>")) throw MalformedPoint("unterminated <point>");
    out.keypoints.push_back({u, v});
    sc.skip_ws();
  }
  if (!sc.consume("<skill>")) throw ParseError("expected <skill> in decision block");
  auto name = sc.until("</skill>");
  if (!name) throw ParseError("unterminated <skill>");
  out.skill_name = std::string(trim(*name));
  sc.skip_ws();
  if (!sc.at_end()) throw ParseError("unexpected content after <skill>");
  return out;
}

struct Span {
  size_t begin;  // position of "<decision>"
  size_t body_begin;
  size_t body_end;  // position of "</decision>"
  size_t end;
};

std::vector<Span> find_blocks(std::string_view text) {
  constexpr std::string_view open = "<decision>";
  constexpr std::string_view close = "</decision>";
  std::vector<Span> spans;
  for (size_t s = text.find(open); s != std::string_view::npos; s = text.find(open, s + 1)) {
    const size_t e = text.find(close, s + open.size());
    if (e == std::string_view::npos) break;
    spans.push_back({s, s + open.size(), e, e + close.size()});
  }
  return spans;
}

std::string last_section(std::string_view region, std::string_view open, std::string_view close) {
  const size_t s = region.rfind(open);
  if (s == std::string_view::npos) return {};
  const size_t b = s + open.size();
  const size_t e = region.find(close, b);
  if (e == std::string_view::npos) return {};
  return unescape(region.substr(b, e - b));
}

}  // namespace

std::string_view to_string(Platform p) { return p == Platform::legged ? "legged" : "arm"; }

std::optional<Platform> platform_from_string(std::string_view s) {
  if (s == "legged") return Platform::legged;
  if (s == "arm") return Platform::arm;
  return std::nullopt;
}

std::string_view skill_name(Skill s) { return kSkillNames[static_cast<size_t>(s)]; }

std::span<const PolicyEntry> policy_pool() { return kPolicyPool; }

std::vector<Skill> skills_for(Platform platform) {
  std::vector<Skill> out;
  for (const auto& e : kPolicyPool) {
    if (e.platform == platform) out.push_back(e.skill);
  }
  return out;
}

bool in_policy_pool(const SkillId& id) {
  return std::ranges::any_of(kPolicyPool, [&](const PolicyEntry& e) {
    return e.platform == id.platform && e.skill == id.skill;
  });
}

SkillId validate_skill(std::string_view name, Platform platform) {
  for (const auto& e : kPolicyPool) {
    if (e.platform == platform && skill_name(e.skill) == name) return {platform, e.skill};
  }
  throw UnknownSkill(std::string(name));
}

bool Decision::same_content(const Decision& o) const {
  return observation == o.observation && plan == o.plan && keypoints == o.keypoints &&
         skill == o.skill;
}

Decision parse_decision(std::string_view text, Platform platform) {
  const auto spans = find_blocks(text);
  if (spans.empty()) throw NoDecisionBlock();

  // Walk candidates from the one that closes last; keep the first error so a
  // single malformed block reports why.
  std::optional<ParseError> first_error;
  std::optional<MalformedPoint> first_point_error;
  for (auto it = spans.rbegin(); it != spans.rend(); ++it) {
    RawBlock raw;
    try {
      raw = parse_block(text.substr(it->body_begin, it->body_end - it->body_begin));
    } catch (const MalformedPoint& e) {
      if (!first_error && !first_point_error) first_point_error = e;
      continue;
    } catch (const ParseError& e) {
      if (!first_error && !first_point_error) first_error = e;
      continue;
    }

    size_t region_begin = 0;
    for (const auto& other : spans) {
      if (other.end <= it->begin) region_begin = std::max(region_begin, other.end);
    }
    const auto region = text.substr(region_begin, it->begin - region_begin);

    Decision d;
    d.skill = validate_skill(raw.skill_name, platform);
    d.keypoints = std::move(raw.keypoints);
    d.observation = last_section(region, "<obs>", "</obs>");
    d.plan = last_section(region, "<plan>", "</plan>");
    d.raw_text = std::string(text);
    return d;
  }
  if (first_point_error) throw *first_point_error;
  throw *first_error;
}

std::string serialize_decision(const Decision& d) {
  if (!in_policy_pool(d.skill)) {
    throw DomainError("skill " + std::string(skill_name(d.skill.skill)) + " not available on " +
                      std::string(to_string(d.skill.platform)));
  }
  std::string out;
  if (!d.observation.empty()) out += "<obs>" + escape(d.observation) + "</obs>";
  if (!d.plan.empty()) out += "<plan>" + escape(d.plan) + "</plan>";
  out += "<decision>";
  for (const auto& p : d.keypoints) {
    if (!std::isfinite(p.u) || !std::isfinite(p.v)) throw DomainError("non-finite keypoint");
    out += "<point>(" + format_double(p.u) + "," + format_double(p.v) + ")</point>";
  }
  out += "<skill>";
  out += skill_name(d.skill.skill);
  out += "</skill></decision>";
  return out;
}

std::string default_normalizer(std::string_view text) {
  static const std::regex bracket_point(
      R"(<point>\s*\[\s*([^\],]+?)\s*,\s*([^\]]+?)\s*\]\s*</point>)");
  static const std::regex skill_tag(R"(<skill>([^<]*)</skill>)");

  std::string s = std::regex_replace(std::string(text), bracket_point, "<point>($1,$2)</point>");

  std::string out;
  auto begin = std::sregex_iterator(s.begin(), s.end(), skill_tag);
  size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.append(s, last, static_cast<size_t>(m.position(0)) - last);
    std::string name(trim(m[1].str()));
    for (char& c : name) {
      if (c == ' ' || c == '-') c = '_';
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    out += "<skill>" + name + "</skill>";
    last = static_cast<size_t>(m.position(0) + m.length(0));
  }
  out.append(s, last);
  return out;
}

}  // namespace brainloop
