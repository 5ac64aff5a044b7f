#include "brainloop/task.hpp"

#include <array>

#include "brainloop/errors.hpp"

namespace brainloop {

namespace {

constexpr std::array<TaskSpec, 14> kTasks{{
    {TaskId::find, "find", Platform::legged, Difficulty::easy, 10, 0,
     "Walk up to the red ball."},
    {TaskId::track, "track", Platform::legged, Difficulty::easy, 10, 0,
     "Walk up to the red ball and stay with it while it rolls."},
    {TaskId::interaction, "interaction", Platform::legged, Difficulty::easy, 20, 0,
     "Read the person's gesture, go to them and answer it."},
    {TaskId::complex_find, "complex_find", Platform::legged, Difficulty::middle, 10, 0,
     "Walk up to the red ball without bumping into anything."},
    {TaskId::complex_interaction, "complex_interaction", Platform::legged, Difficulty::middle, 20, 0,
     "Read the person's gesture, go to them around the obstacle and answer it."},
    {TaskId::transport, "transport", Platform::legged, Difficulty::middle, 10, 0,
     "Carry the basket to the crate and empty it inside."},
    {TaskId::complex_transport, "complex_transport", Platform::legged, Difficulty::hard, 10, 0,
     "Carry the basket around the obstacle to the crate and empty it inside."},
    {TaskId::banana_in, "banana_in", Platform::arm, Difficulty::easy, 10, 0,
     "Put the banana into the box."},
    {TaskId::pepper_in, "pepper_in", Platform::arm, Difficulty::easy, 10, 0,
     "Put the pepper into the box."},
    {TaskId::carrot_out, "carrot_out", Platform::arm, Difficulty::easy, 10, 0,
     "Take the carrot out of the box and leave it on the table."},
    {TaskId::kiwifruit_out, "kiwifruit_out", Platform::arm, Difficulty::easy, 10, 0,
     "Take the kiwifruit out of the box and leave it on the table."},
    {TaskId::open_drawer, "open_drawer", Platform::arm, Difficulty::middle, 10, 0,
     "Slide the drawer fully open."},
    {TaskId::lh_carrot, "lh_carrot", Platform::arm, Difficulty::hard, 10, 0,
     "Open the drawer, then take the carrot out of it and leave it on the table."},
    {TaskId::lh_pepper, "lh_pepper", Platform::arm, Difficulty::hard, 10, 0,
     "Open the drawer, then take the pepper out of it and leave it on the table."},
}};

constexpr std::array<Gesture, 4> kGestureCycle{Gesture::come, Gesture::sit, Gesture::shake,
                                               Gesture::touch};

}  // namespace

std::span<const TaskSpec> all_tasks() { return kTasks; }

const TaskSpec& task_spec(TaskId id) { return kTasks[static_cast<size_t>(id)]; }

std::optional<TaskId> task_from_string(std::string_view name) {
  for (const auto& t : kTasks) {
    if (t.name == name) return t.id;
  }
  return std::nullopt;
}

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::easy: return "easy";
    case Difficulty::middle: return "middle";
    case Difficulty::hard: return "hard";
  }
  return "";
}

std::string_view to_string(Gesture g) {
  switch (g) {
    case Gesture::none: return "none";
    case Gesture::come: return "come";
    case Gesture::sit: return "sit";
    case Gesture::shake: return "shake";
    case Gesture::touch: return "touch";
  }
  return "";
}

std::optional<Gesture> gesture_from_string(std::string_view s) {
  for (Gesture g : {Gesture::none, Gesture::come, Gesture::sit, Gesture::shake, Gesture::touch}) {
    if (to_string(g) == s) return g;
  }
  return std::nullopt;
}

bool is_interaction(TaskId id) { return id == TaskId::interaction || id == TaskId::complex_interaction; }

bool is_complex(TaskId id) {
  return id == TaskId::complex_find || id == TaskId::complex_interaction ||
         id == TaskId::complex_transport;
}

Gesture gesture_for_trial(TaskId id, int trial_index) {
  if (!is_interaction(id)) return Gesture::none;
  const int per_gesture = task_spec(id).trials / static_cast<int>(kGestureCycle.size());
  const int slot = (trial_index / per_gesture) % static_cast<int>(kGestureCycle.size());
  return kGestureCycle[static_cast<size_t>(slot < 0 ? slot + 4 : slot)];
}

Skill skill_for_gesture(Gesture g) {
  switch (g) {
    case Gesture::sit: return Skill::sit;
    case Gesture::shake: return Skill::shake;
    case Gesture::touch: return Skill::touch;
    case Gesture::come:
    case Gesture::none: return Skill::walk;
  }
  return Skill::walk;
}

}  // namespace brainloop
