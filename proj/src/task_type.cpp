#include "semflow/task_type.hpp"

#include <map>

#include "semflow/errors.hpp"

namespace semflow {

const std::vector<TaskType>& all_task_types() {
    static const std::vector<TaskType> kAll = {
        TaskType::background_change, TaskType::color_alter,    TaskType::material_alter,
        TaskType::motion_change,     TaskType::ps_human,       TaskType::style_change,
        TaskType::subject_add,       TaskType::subject_remove, TaskType::subject_replace,
        TaskType::text_change,       TaskType::tone_transfer,
    };
    return kAll;
}

std::string to_string(TaskType t) {
    switch (t) {
        case TaskType::background_change: return "background_change";
        case TaskType::color_alter: return "color_alter";
        case TaskType::material_alter: return "material_alter";
        case TaskType::motion_change: return "motion_change";
        case TaskType::ps_human: return "ps_human";
        case TaskType::style_change: return "style_change";
        case TaskType::subject_add: return "subject_add";
        case TaskType::subject_remove: return "subject_remove";
        case TaskType::subject_replace: return "subject_replace";
        case TaskType::text_change: return "text_change";
        case TaskType::tone_transfer: return "tone_transfer";
    }
    throw ConfigError("invalid task type value");
}

TaskType task_type_from_string(const std::string& name) {
    for (TaskType t : all_task_types()) {
        if (to_string(t) == name) return t;
    }
    throw ConfigError("unknown task type: " + name);
}

const std::vector<SlotRule>& required_slots(TaskType t) {
    static const std::vector<SlotRule> kNone = {};
    static const std::vector<SlotRule> kColor = {{"color", true}};
    static const std::vector<SlotRule> kMaterial = {{"material", true}};
    static const std::vector<SlotRule> kPose = {{"pose", true}};
    static const std::vector<SlotRule> kStyle = {{"style", false}};
    static const std::vector<SlotRule> kBackground = {{"background", false}};
    static const std::vector<SlotRule> kTone = {{"tone", false}};
    switch (t) {
        case TaskType::color_alter: return kColor;
        case TaskType::material_alter: return kMaterial;
        case TaskType::motion_change: return kPose;
        case TaskType::style_change: return kStyle;
        case TaskType::background_change: return kBackground;
        case TaskType::tone_transfer: return kTone;
        default: return kNone;
    }
}

const std::string& default_slot_token(const std::string& slot) {
    static const std::map<std::string, std::string> kDefaults = {
        {"color", "plain"},     {"material", "bare"}, {"rank", "untitled"},
        {"pose", "still"},      {"style", "natural"}, {"background", "blank"},
        {"tone", "neutral"},    {"misc", "usual"},
    };
    auto it = kDefaults.find(slot);
    if (it == kDefaults.end()) throw ConfigError("no default filler for slot: " + slot);
    return it->second;
}

}  // namespace semflow
