#pragma once

#include <string>
#include <vector>

#include "semflow/dse.hpp"
#include "semflow/instruction.hpp"
#include "semflow/verifier.hpp"

namespace semflow {

struct UevConfig {
    DseConfig dse;
    VerifierConfig verifier;
    double amplitude = 4.0;      // prompt-target mean = amplitude * embedding
    double target_stddev = 0.25;
};

struct RoundResult {
    int round = 0;
    EditPlan plan;
    Trajectory trajectory;
    double best_score = 0.0;
    int best_step = 0;
    Vec best_latent;
    bool stopped_early = false;
    SceneGraph decoded_best;
    std::string corrective;  // instruction handed to the next round, if any
};

struct EditResult {
    bool converged = false;
    int rounds_used = 0;
    double final_score = 0.0;
    Vec final_latent;
    SceneGraph final_graph;
    std::vector<RoundResult> rounds;
};

// Understanding -> editing -> verifying loop. Round 1 plans from the scene
// and instruction and edits from the scene's caption latent. While the best
// score stays below sigma, each following round restarts from the best latent,
// re-plans against its decoded graph, and edits under the corrective
// instruction derived from the worst feedback residual. The patience window
// resets every round; at most verifier.max_rounds rounds run. The per-round
// DSE seed is derived from config.dse.seed and the round number.
EditResult run_uev(const SceneGraph& scene, const std::string& instruction, TaskType task,
                   const Vocabulary& vocab, const UevConfig& config);

}  // namespace semflow
