#include "semflow/uev.hpp"

#include "semflow/errors.hpp"

namespace semflow {

// Understanding -> editing -> verifying. Each round plans against the current
// graph, runs the paired-trajectory editor with the verifier watching every
// record, and either accepts the best latent (score >= sigma) or derives a
// corrective instruction from the worst feedback residual and tries again
// from that best latent. A corrective that no longer resolves against the
// decoded graph ends the loop with the best result so far instead of blowing
// up a legitimate non-converged run.
EditResult run_uev(const SceneGraph& scene, const std::string& instruction, TaskType task,
                   const Vocabulary& vocab, const UevConfig& config) {
    scene.validate();
    config.verifier.validate();
    if (scene.nodes.empty()) throw DomainError("cannot edit an empty scene");
    if (!(config.amplitude > 0.0)) throw ConfigError("amplitude must be positive");
    if (!(config.target_stddev > 0.0)) throw ConfigError("target stddev must be positive");

    EditResult result;
    SceneGraph g = scene;
    std::string q = instruction;

    Vec e_scene = embed_prompt(vocab, caption_tokens(g, task));
    if (is_zero(e_scene))
        throw DomainError("the scene caption embeds to the null prompt; nothing to edit");
    Vec z = scale(e_scene, config.amplitude);

    for (int round = 1; round <= config.verifier.max_rounds; ++round) {
        EditPlan plan;
        try {
            plan = build_edit_plan(g, q, task, vocab);
        } catch (const UnresolvableReferentError&) {
            if (round == 1) throw;  // user instruction: surface it
            break;                  // stale corrective against a drifted decode
        }
        Vec e_src = embed_prompt(vocab, plan.caption_src);
        Vec e_tar = embed_prompt(vocab, plan.caption_tar);
        if (is_zero(e_tar))
            throw DomainError("the target caption embeds to the null prompt; the edit would "
                              "erase every concept");

        DseConfig dse_cfg = config.dse;
        dse_cfg.seed = mix_seed(mix_seed(config.dse.seed, "uev-round"),
                                static_cast<std::uint64_t>(round));

        VerifierState verifier;
        StepObserver observer = [&](const StepRecord& rec) {
            verifier.observe(rec, config.verifier);
            return should_stop(verifier, config.verifier) ? StepControl::halt
                                                          : StepControl::continue_run;
        };

        PromptTarget src = PromptTarget::from_embedding(e_src, config.amplitude,
                                                        config.target_stddev);
        PromptTarget tar = PromptTarget::from_embedding(e_tar, config.amplitude,
                                                        config.target_stddev);
        Trajectory traj = run_dse(z, src, tar, e_tar, dse_cfg, observer);

        RoundResult rr;
        rr.round = round;
        rr.plan = std::move(plan);
        rr.best_score = verifier.best_score;
        rr.best_step = verifier.best_step;
        rr.best_latent = verifier.best_latent;
        rr.stopped_early = traj.halt_reason == "early_stop";
        rr.decoded_best = decode_to_graph(verifier.best_latent, vocab, rr.plan.graph_tar);
        rr.trajectory = std::move(traj);

        result.rounds_used = round;
        bool converged = verifier.best_score >= config.verifier.threshold_sigma;
        if (converged || round == config.verifier.max_rounds) {
            result.converged = converged;
            result.final_score = verifier.best_score;
            result.final_latent = verifier.best_latent;
            result.final_graph = rr.decoded_best;
            result.rounds.push_back(std::move(rr));
            return result;
        }

        FeedbackVector feedback = compute_feedback(verifier.best_latent, rr.plan.graph_tar, vocab);
        q = corrective_instruction(feedback, rr.plan.graph_tar);
        rr.corrective = q;
        g = rr.decoded_best;
        z = verifier.best_latent;
        result.final_score = verifier.best_score;
        result.final_latent = verifier.best_latent;
        result.final_graph = rr.decoded_best;
        result.rounds.push_back(std::move(rr));
    }
    return result;
}

}  // namespace semflow
