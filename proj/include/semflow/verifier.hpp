#pragma once

#include <string>
#include <vector>

#include "semflow/dse.hpp"
#include "semflow/scene_graph.hpp"
#include "semflow/vocabulary.hpp"

namespace semflow {

struct VerifierConfig {
    double threshold_sigma = 9.0;  // in [0, 10]; 9 is cos >= 0.8 exactly
    int patience_window = 8;
    double min_improvement = 1e-3;
    int max_rounds = 3;
    // Which occurrence of the maximum counts as the best step.
    enum class BestPick { first, last };
    BestPick best_pick = BestPick::first;

    void validate() const;
};

// Score bookkeeping over one trajectory. best_score/best_step track the raw
// running maximum (first or last occurrence per config). sig_best_step tracks
// the last *significant* improvement (>= min_improvement over the previous
// significant best); the patience window counts scores observed after it, so
// hair-width new maxima do not reset the patience.
struct VerifierState {
    std::vector<double> history;
    double best_score = -1.0;
    int best_step = -1;
    Vec best_latent;
    double sig_best_score = -1.0;
    int sig_best_step = -1;

    void observe(double score, const Vec& latent, const VerifierConfig& config);
    void observe(const StepRecord& record, const VerifierConfig& config);
};

// Replays a score sequence through a fresh state (no latents).
VerifierState replay_scores(const std::vector<double>& scores, const VerifierConfig& config);

// True iff best_score >= threshold and at least patience_window scores were
// observed after the last significant improvement.
bool should_stop(const VerifierState& state, const VerifierConfig& config);

// similarity_score of the edit latent against the target caption embedding.
double score_step(const Vec& z_edit, const Vec& target_embedding);

// One feedback entry per node name and per filled attribute slot of the
// target graph: residual = 1 - cos(z_edit, embedding(token)). observed_token
// is the nearest in-group token to z_edit (what the latent currently decodes
// to), target_token the one the graph asks for.
struct FeedbackEntry {
    int node_id = 0;
    bool is_name = false;
    std::string slot;  // empty for name entries
    std::string target_token;
    std::string observed_token;
    double residual = 0.0;
};

struct FeedbackVector {
    std::vector<FeedbackEntry> entries;

    // Largest-magnitude residual; ties resolved by entry order (node order,
    // name before slots, slots in canonical order).
    const FeedbackEntry& worst() const;
    double total() const;
};

FeedbackVector compute_feedback(const Vec& z_edit, const SceneGraph& graph_tar,
                                const Vocabulary& vocab);

// Corrective instruction for the worst entry:
//   slot entry: "change the <slot> of <name> to <token>"
//   name entry: "replace the <observed> with a <target>"
// Both forms re-parse under every task grammar.
std::string corrective_instruction(const FeedbackVector& feedback, const SceneGraph& graph_tar);

// Copies the template graph, replacing each node name and filled slot value
// by the token of its axis group nearest (by cosine) to z. Ties pick the
// lexicographically smaller token; free concepts stay as-is.
SceneGraph decode_to_graph(const Vec& z, const Vocabulary& vocab, const SceneGraph& template_graph);

}  // namespace semflow
