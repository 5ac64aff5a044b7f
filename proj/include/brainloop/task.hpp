#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "brainloop/decision.hpp"

namespace brainloop {

enum class TaskId {
  // legged
  find,
  track,
  interaction,
  complex_find,
  complex_interaction,
  transport,
  complex_transport,
  // arm
  banana_in,
  pepper_in,
  carrot_out,
  kiwifruit_out,
  open_drawer,
  lh_carrot,
  lh_pepper,
};

enum class Difficulty { easy, middle, hard };

enum class Gesture { none, come, sit, shake, touch };

struct TaskSpec {
  TaskId id;
  std::string_view name;
  Platform platform;
  Difficulty difficulty;
  int trials;         // per battery run
  int timeout_ticks;  // 0 = use the adapter's T_max
  std::string_view prompt;
};

std::span<const TaskSpec> all_tasks();
const TaskSpec& task_spec(TaskId id);
std::optional<TaskId> task_from_string(std::string_view name);
std::string_view to_string(Difficulty d);
std::string_view to_string(Gesture g);
std::optional<Gesture> gesture_from_string(std::string_view s);

bool is_interaction(TaskId id);
bool is_complex(TaskId id);

// Interaction tasks cycle through the four gestures, five trials each.
Gesture gesture_for_trial(TaskId id, int trial_index);

// The skill a human's gesture asks for (come -> walk).
Skill skill_for_gesture(Gesture g);

}  // namespace brainloop
