#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "semflow/rng.hpp"
#include "semflow/vec.hpp"
#include "semflow/velocity.hpp"

namespace semflow {

// Per-step gains for the edit accumulation. Gains already contain the 1/T
// step width: uniform sums to 1, decayed to (1 + 0.6 + 0.3)/3.
struct AlphaSchedule {
    enum class Kind { uniform, decayed, custom };
    Kind kind = Kind::decayed;
    std::vector<double> gains;

    static AlphaSchedule uniform(int steps);
    // Thirds at 1/T, 0.6/T, 0.3/T; steps must be divisible by 3.
    static AlphaSchedule decayed(int steps);
    static AlphaSchedule custom(std::vector<double> gains);
};

AlphaSchedule::Kind schedule_kind_from_string(const std::string& name);
std::string to_string(AlphaSchedule::Kind k);

// State after step k. For k >= 1, z_src_t and z_tar_t are the branch latents
// at the step's evaluation time 1 - (k-1)/T (the left endpoint; t = 0 is never
// queried), t is the time reached (1 - k/T), z_edit is the updated edit latent
// and delta_v the applied velocity delta. Step 0 records the initial state:
// z_edit = Z_src(0) at t = 1 with zero delta_v.
struct StepRecord {
    int k = 0;
    double t = 1.0;
    Vec z_src_t;
    Vec z_tar_t;
    Vec z_edit;
    Vec delta_v;
    double score = 0.0;
};

struct DseConfig {
    int steps = 30;
    AlphaSchedule schedule = AlphaSchedule::decayed(30);
    GuidanceConfig guidance;
    NoiseSchedule noise;
    std::uint64_t seed = 0;
};

struct Trajectory {
    std::vector<StepRecord> steps;  // records 0..n, steps[0] is the init record
    std::string halt_reason;        // "completed" or "early_stop"
    Vec score_ref;                  // embedding scored against at each step

    int step_count() const { return static_cast<int>(steps.size()) - 1; }
    const Vec& initial_latent() const { return steps.front().z_edit; }
    const Vec& final_latent() const { return steps.back().z_edit; }
};

enum class StepControl { continue_run, halt };
using StepObserver = std::function<StepControl(const StepRecord&)>;

struct DseState {
    int k = 0;
    Vec z_src0;
    Vec z_edit;
    Rng rng;

    DseState(Vec z0, std::uint64_t seed)
        : z_src0(std::move(z0)), z_edit(z_src0), rng(mix_seed(seed, "dse")) {}
};

// One editing step: draws fresh eps_k (shared by both branches), forms
//   Z_src(t)  = (1 - t) Z_src(0) + t eps_k
//   Z_tar(t)  = z_edit + Z_src(t) - Z_src(0)
// at the left endpoint t = 1 - (k-1)/T, evaluates the guided fields for both
// prompts, negates them into the denoising direction, and applies
//   z_edit += alpha_k * (V_tar - V_src).
// guided_velocity returns the data-to-noise field, so the editor flips the
// sign once here; without the flip edits would walk away from the target.
StepRecord dse_step(DseState& state, const PromptTarget& src, const PromptTarget& tar,
                    const Vec& score_ref, const DseConfig& config);

// Runs steps 1..config.steps from z_src0, recording the init record first.
// The observer (if any) sees every record, including the init record, and may
// halt the run. score_ref must be a nonzero embedding.
Trajectory run_dse(const Vec& z_src0, const PromptTarget& src, const PromptTarget& tar,
                   const Vec& score_ref, const DseConfig& config,
                   const StepObserver& observer = nullptr);

}  // namespace semflow
