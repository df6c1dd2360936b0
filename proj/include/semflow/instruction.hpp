#pragma once

#include <string>
#include <vector>

#include "semflow/scene_graph.hpp"
#include "semflow/vocabulary.hpp"

namespace semflow {

// One aligned token edit between captions. pos indexes the source caption.
// Substitution: both tokens set. Deletion: after empty. Insertion: before
// empty, inserted ahead of source position pos.
struct Replacement {
    int pos = 0;
    std::string before;
    std::string after;

    bool operator==(const Replacement&) const = default;
};

struct EditPlan {
    TaskType task = TaskType::color_alter;
    std::string instruction;
    SceneGraph graph_src;
    SceneGraph graph_tar;
    GraphPatch patch;
    std::vector<std::string> caption_src;
    std::vector<std::string> caption_tar;
    std::vector<Replacement> replacements;
};

// Parses an instruction under the task's grammar into a graph patch against g.
// Ops that would not change g are dropped (an identity instruction yields an
// empty patch). Throws GrammarError, UnresolvableReferentError,
// VocabularyError, or UnsupportedTaskError (text_change).
GraphPatch parse_instruction(const std::string& instruction, TaskType task,
                             const SceneGraph& g, const Vocabulary& vocab);

// Full plan: source caption, patched target graph, target caption, and the
// positional replacements between the captions.
EditPlan build_edit_plan(const SceneGraph& g, const std::string& instruction,
                         TaskType task, const Vocabulary& vocab);

// LCS-aligned token edit script from a to b; adjacent delete+insert pairs at
// one alignment gap merge into substitutions. Applying it to a yields b.
std::vector<Replacement> token_diff(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b);

std::vector<std::string> apply_replacements(const std::vector<std::string>& a,
                                            const std::vector<Replacement>& reps);

std::vector<std::string> tokenize_instruction(const std::string& text);

}  // namespace semflow
