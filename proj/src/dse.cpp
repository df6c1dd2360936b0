#include "semflow/dse.hpp"

#include <cmath>

#include "semflow/errors.hpp"
#include "semflow/vocabulary.hpp"

namespace semflow {

AlphaSchedule AlphaSchedule::uniform(int steps) {
    if (steps < 1) throw ConfigError("schedule needs at least one step");
    AlphaSchedule s;
    s.kind = Kind::uniform;
    s.gains.assign(static_cast<std::size_t>(steps), 1.0 / steps);
    return s;
}

AlphaSchedule AlphaSchedule::decayed(int steps) {
    if (steps < 1) throw ConfigError("schedule needs at least one step");
    if (steps % 3 != 0) throw ConfigError("decayed schedule needs a step count divisible by 3");
    AlphaSchedule s;
    s.kind = Kind::decayed;
    s.gains.resize(static_cast<std::size_t>(steps));
    int third = steps / 3;
    for (int k = 0; k < steps; ++k) {
        double level = k < third ? 1.0 : (k < 2 * third ? 0.6 : 0.3);
        s.gains[static_cast<std::size_t>(k)] = level / steps;
    }
    return s;
}

AlphaSchedule AlphaSchedule::custom(std::vector<double> gains) {
    if (gains.empty()) throw ConfigError("custom schedule needs at least one gain");
    for (double g : gains)
        if (!(g >= 0.0 && g <= 1.0) || !std::isfinite(g))
            throw ConfigError("custom schedule gains must lie in [0, 1]");
    AlphaSchedule s;
    s.kind = Kind::custom;
    s.gains = std::move(gains);
    return s;
}

AlphaSchedule::Kind schedule_kind_from_string(const std::string& name) {
    if (name == "uniform") return AlphaSchedule::Kind::uniform;
    if (name == "decayed") return AlphaSchedule::Kind::decayed;
    if (name == "custom") return AlphaSchedule::Kind::custom;
    throw ConfigError("unknown schedule '" + name + "' (expected uniform or decayed)");
}

std::string to_string(AlphaSchedule::Kind kind) {
    switch (kind) {
        case AlphaSchedule::Kind::uniform: return "uniform";
        case AlphaSchedule::Kind::decayed: return "decayed";
        case AlphaSchedule::Kind::custom: return "custom";
    }
    throw ConfigError("invalid schedule kind");
}

// One edit step of the paired-trajectory scheme.
//
// Step k (1-based) draws fresh noise eps_k, renoises the source latent to the
// left endpoint t = 1 - (k-1)/T, and places the edit latent at the same noise
// level by sharing the displacement: z_tar_t = z_edit + (z_src_t - z_src0).
// Both branches are pushed through the guided field; because the field
// reports the data-to-noise direction, the branch velocities are negated so
// they denoise, and the edit latent absorbs the difference:
//
//   delta_v = (-V_tar) - (-V_src),  z_edit += gain_k * delta_v
//
// The source cancels shared structure, so only the semantic pull of the
// target prompt accumulates. The record's t is the level reached, 1 - k/T;
// t = 0 is therefore never queried (the last evaluation sits at 1/T).
StepRecord dse_step(DseState& state, const PromptTarget& src, const PromptTarget& tar,
                    const Vec& score_ref, const DseConfig& config) {
    const int T = config.steps;
    if (state.k >= T) throw DomainError("trajectory already ran all steps");
    const int k = state.k + 1;
    const double t_eval = 1.0 - static_cast<double>(k - 1) / T;

    Vec eps = state.rng.normal_vec(static_cast<int>(state.z_src0.size()));
    Vec z_src_t = forward_diffuse(state.z_src0, t_eval, eps, config.noise);
    Vec z_tar_t = state.z_edit;
    for (std::size_t i = 0; i < z_tar_t.size(); ++i) z_tar_t[i] += z_src_t[i] - state.z_src0[i];

    Vec v_src = guided_velocity(z_src_t, t_eval, src, config.guidance.scale_src, config.noise);
    Vec v_tar = guided_velocity(z_tar_t, t_eval, tar, config.guidance.scale_tar, config.noise);
    Vec delta_v(v_src.size());
    for (std::size_t i = 0; i < delta_v.size(); ++i) delta_v[i] = -v_tar[i] - (-v_src[i]);

    axpy(state.z_edit, config.schedule.gains[static_cast<std::size_t>(k - 1)], delta_v);
    state.k = k;

    StepRecord rec;
    rec.k = k;
    rec.t = 1.0 - static_cast<double>(k) / T;
    rec.z_src_t = std::move(z_src_t);
    rec.z_tar_t = std::move(z_tar_t);
    rec.z_edit = state.z_edit;
    rec.delta_v = std::move(delta_v);
    rec.score = similarity_score(score_ref, state.z_edit);
    return rec;
}

Trajectory run_dse(const Vec& z0, const PromptTarget& src, const PromptTarget& tar,
                   const Vec& score_ref, const DseConfig& config, const StepObserver& observer) {
    if (config.steps < 1) throw ConfigError("run needs at least one step");
    if (config.schedule.gains.size() != static_cast<std::size_t>(config.steps))
        throw ConfigError("schedule length does not match the step count");
    if (is_zero(z0)) throw DomainError("initial latent is the zero vector");
    if (is_zero(score_ref)) throw DomainError("score reference is the zero vector");
    if (z0.size() != score_ref.size()) throw DimensionError("latent and reference dimensions differ");
    src.validate();
    tar.validate();
    if (src.dimension() != static_cast<int>(z0.size()) ||
        tar.dimension() != static_cast<int>(z0.size()))
        throw DimensionError("prompt targets disagree with the latent dimension");

    Trajectory traj;
    traj.score_ref = score_ref;
    traj.halt_reason = "completed";

    StepRecord init;
    init.k = 0;
    init.t = 1.0;
    init.z_src_t = z0;
    init.z_tar_t = z0;
    init.z_edit = z0;
    init.delta_v = zeros(z0.size());
    init.score = similarity_score(score_ref, z0);
    traj.steps.push_back(init);
    if (observer && observer(traj.steps.back()) == StepControl::halt) {
        traj.halt_reason = "early_stop";
        return traj;
    }

    DseState state(z0, config.seed);
    for (int k = 1; k <= config.steps; ++k) {
        traj.steps.push_back(dse_step(state, src, tar, score_ref, config));
        if (observer && observer(traj.steps.back()) == StepControl::halt) {
            traj.halt_reason = "early_stop";
            break;
        }
    }
    return traj;
}

}  // namespace semflow
