#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "semflow/task_type.hpp"
#include "semflow/vocabulary.hpp"

namespace semflow {

struct ObjectNode {
    int id = 0;
    std::string name;
    std::map<std::string, std::string> attributes;  // slot -> token, one value per slot

    bool operator==(const ObjectNode&) const = default;
};

struct Edge {
    int subject = 0;
    std::string relation;
    int object = 0;

    auto operator<=>(const Edge&) const = default;
};

struct SceneGraph {
    std::vector<ObjectNode> nodes;
    std::vector<Edge> edges;

    const ObjectNode* find(int id) const;
    ObjectNode* find(int id);
    // First node (in node order) with the given name, or nullptr.
    const ObjectNode* find_by_name(const std::string& name) const;
    int next_id() const;

    // Checks: unique ids, edge endpoints exist, no self-loops, no duplicate edges.
    void validate() const;

    bool operator==(const SceneGraph&) const = default;
};

enum class PatchOpKind {
    add_node,
    remove_node,
    relabel,
    set_attribute,
    clear_attribute,
    set_relation,
    remove_relation,
};

std::string to_string(PatchOpKind k);

struct PatchOp {
    PatchOpKind kind = PatchOpKind::add_node;
    ObjectNode node;    // add_node
    int id = 0;         // remove_node, relabel, set_attribute, clear_attribute
    std::string name;   // relabel
    std::string slot;   // set_attribute, clear_attribute
    std::string token;  // set_attribute
    Edge edge;          // set_relation, remove_relation

    static PatchOp add_node(ObjectNode n);
    static PatchOp remove_node(int id);
    static PatchOp relabel(int id, std::string name);
    static PatchOp set_attribute(int id, std::string slot, std::string token);
    static PatchOp clear_attribute(int id, std::string slot);
    static PatchOp set_relation(Edge e);
    static PatchOp remove_relation(Edge e);

    bool operator==(const PatchOp&) const = default;
};

using GraphPatch = std::vector<PatchOp>;

// Applies ops in order to a copy; throws PatchError with the failing op index.
// remove_node requires its incident edges to have been removed first.
SceneGraph apply_patch(const SceneGraph& g, const GraphPatch& patch);

// Minimal patch (fewest ops) with apply_patch(src, patch) equivalent to tar up
// to node-id renaming. For small graphs the node matching minimizes total op
// count exhaustively (relabel versus remove+add decided by cost, edge rewrites
// included); larger graphs fall back to greedy name/overlap matching. Ties
// prefer same-name pairs in node order.
GraphPatch graph_diff(const SceneGraph& src, const SceneGraph& tar);

// Structural equality up to a bijective node-id renaming.
bool equivalent(const SceneGraph& a, const SceneGraph& b);

// Slot ordering used in captions and canonical op emission.
const std::vector<std::string>& canonical_slot_order();
bool is_known_slot(const std::string& slot);

// Caption template: per node "a [attr ...] [name]" with attributes in
// canonical slot order, then "[subj] [rel] [obj]" per edge, phrases joined by
// ".". Slots forced by the task caption their default filler when unset.
std::vector<std::string> caption_tokens(const SceneGraph& g, TaskType task);
std::string caption_string(const SceneGraph& g, TaskType task);

}  // namespace semflow
