#pragma once

#include <string>
#include <vector>

namespace semflow {

// Editing task categories accepted by the parser. text_change is recognized
// but rejected with unsupported_task: glyph editing has no counterpart in the
// semantic world.
enum class TaskType {
    background_change,
    color_alter,
    material_alter,
    motion_change,
    ps_human,
    style_change,
    subject_add,
    subject_remove,
    subject_replace,
    text_change,
    tone_transfer,
};

const std::vector<TaskType>& all_task_types();

std::string to_string(TaskType t);
TaskType task_type_from_string(const std::string& name);  // throws ConfigError

// Attribute slots a task forces into captions even when unset, so that the
// source and target captions align token-for-token around the edit.
struct SlotRule {
    std::string slot;
    bool all_nodes;  // false: first node only (scene-scoped slots)
};

const std::vector<SlotRule>& required_slots(TaskType t);

// Fixed neutral filler captioned for a forced-but-unset slot. Fillers are
// stop words: they never enter embeddings and never shadow vocabulary tokens.
const std::string& default_slot_token(const std::string& slot);

}  // namespace semflow
