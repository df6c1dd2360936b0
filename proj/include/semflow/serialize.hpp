#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "semflow/dse.hpp"
#include "semflow/instruction.hpp"
#include "semflow/scene_graph.hpp"
#include "semflow/uev.hpp"
#include "semflow/vocabulary.hpp"

namespace semflow {

using json = nlohmann::json;

// Vocabulary: {dimension, seed, axes: {name: [tokens]}, embeddings: {token: [floats]}}.
// Loading rebuilds from (dimension, seed, axes) and verifies the stored floats
// bit for bit; a mismatch raises VocabularyError.
json vocabulary_to_json(const Vocabulary& vocab);
Vocabulary vocabulary_from_json(const json& j);

// SceneGraph: {nodes: [{id, name, attributes}], edges: [[subject, relation, object]]}.
json scene_graph_to_json(const SceneGraph& g);
SceneGraph scene_graph_from_json(const json& j);

json patch_op_to_json(const PatchOp& op);
PatchOp patch_op_from_json(const json& j);
json patch_to_json(const GraphPatch& patch);
GraphPatch patch_from_json(const json& j);

json edit_plan_to_json(const EditPlan& plan);

json trajectory_to_json(const Trajectory& traj, const DseConfig& config);

// CSV, one row per record: k,t,score,delta_v_norm,cos_to_source,cos_to_target
// (schema frozen in docs/schemas.md).
std::string trajectory_to_csv(const Trajectory& traj);

json edit_result_to_json(const EditResult& result);

// Shortest round-trip decimal form, locale-independent (std::to_chars).
std::string format_double(double x);

std::string read_text_file(const std::filesystem::path& path);
// Writes to a temp file in the target directory, then renames over path.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

void save_json(const std::filesystem::path& path, const json& j);
json load_json(const std::filesystem::path& path);

}  // namespace semflow
