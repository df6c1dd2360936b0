#pragma once

#include <vector>

#include "semflow/vec.hpp"

namespace semflow {

// Interpolation schedule lambda(t) for Z(t) = (1 - lambda) X0 + lambda eps.
// Linear is the only kind; the struct is the hook for other monotone paths.
struct NoiseSchedule {
    enum class Kind { linear };
    Kind kind = Kind::linear;

    double lambda(double t) const;  // lambda(0) = 0, lambda(1) = 1
};

struct MixtureComponent {
    double weight = 1.0;
    Vec mean;
};

// Gaussian (mixture) over clean latents X0 tied to a prompt. All components
// share the isotropic stddev. An empty mixture means the single component
// (mean, stddev).
struct PromptTarget {
    Vec mean;
    double stddev = 0.25;
    std::vector<MixtureComponent> mixture;

    int dimension() const;
    void validate() const;

    // amplitude * embedding as the component mean; the zero embedding (null
    // prompt) maps to the standard normal target.
    static PromptTarget from_embedding(const Vec& embedding, double amplitude, double stddev);
    static PromptTarget standard_normal(int dim);
};

struct GuidanceConfig {
    double scale_src = 2.0;
    double scale_tar = 5.5;
};

// Z(t) = (1 - lambda(t)) z0 + lambda(t) eps; t in [0, 1].
Vec forward_diffuse(const Vec& z0, double t, const Vec& eps,
                    const NoiseSchedule& sched = {});

// Exact conditional velocity v(z, t) = E[eps - X0 | Z(t) = z] for the target
// distribution: the data-to-noise direction. Denoising integrates with
// negative time increments (z <- z - dt * v stepping t from 1 to 0). t = 0 is
// out of domain. Mixture components are responsibility-weighted by their
// marginal density at z.
Vec conditional_velocity(const Vec& z, double t, const PromptTarget& target,
                         const NoiseSchedule& sched = {});

// Classifier-free guidance around conditional_velocity:
//   v_uncond + scale * (v_cond - v_uncond)
// with the standard normal as the unconditional target. scale = 1 returns the
// conditional field; scale = 0 the unconditional one.
Vec guided_velocity(const Vec& z, double t, const PromptTarget& cond, double scale,
                    const NoiseSchedule& sched = {});

}  // namespace semflow
