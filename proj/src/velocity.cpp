#include "semflow/velocity.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "semflow/errors.hpp"

namespace semflow {

double NoiseSchedule::lambda(double t) const {
    if (t < 0.0 || t > 1.0) throw DomainError("time outside [0, 1]");
    return t;  // linear schedule; the only kind
}

int PromptTarget::dimension() const {
    if (!mixture.empty()) return static_cast<int>(mixture.front().mean.size());
    return static_cast<int>(mean.size());
}

void PromptTarget::validate() const {
    if (!(stddev > 0.0)) throw DomainError("target stddev must be positive");
    if (mixture.empty()) {
        if (mean.empty()) throw DomainError("target has no mean and no mixture");
        return;
    }
    double wsum = 0.0;
    for (const auto& c : mixture) {
        if (!(c.weight > 0.0)) throw DomainError("mixture weights must be positive");
        if (c.mean.size() != mixture.front().mean.size())
            throw DimensionError("mixture components disagree on dimension");
        wsum += c.weight;
    }
    if (!(wsum > 0.0)) throw DomainError("mixture weights sum to zero");
}

PromptTarget PromptTarget::from_embedding(const Vec& embedding, double amplitude, double stddev) {
    PromptTarget t;
    if (is_zero(embedding)) {
        // Null prompt: the unconditional source, a standard normal.
        t.mean = zeros(embedding.size());
        t.stddev = 1.0;
    } else {
        t.mean = scale(embedding, amplitude);
        t.stddev = stddev;
    }
    return t;
}

PromptTarget PromptTarget::standard_normal(int dim) {
    PromptTarget t;
    t.mean = zeros(static_cast<std::size_t>(dim));
    t.stddev = 1.0;
    return t;
}

Vec forward_diffuse(const Vec& z0, double t, const Vec& eps, const NoiseSchedule& schedule) {
    check_same_dim(z0, eps, "forward_diffuse");
    double lam = schedule.lambda(t);
    Vec out(z0.size());
    for (std::size_t i = 0; i < z0.size(); ++i) out[i] = (1.0 - lam) * z0[i] + lam * eps[i];
    return out;
}

// Exact conditional velocity E[eps - X0 | Z_t = z] of the linear bridge
// Z_t = (1-t) X0 + t eps with X0 a (mixture of) isotropic Gaussian(s) and
// eps standard normal. Positive values point from data toward noise; a
// denoising integrator steps against this field. t = 0 is out of domain
// (Z_0 = X0 carries no noise to estimate).
Vec conditional_velocity(const Vec& z, double t, const PromptTarget& target,
                         const NoiseSchedule& schedule) {
    target.validate();
    if (!(t > 0.0 && t <= 1.0)) throw DomainError("conditional velocity needs t in (0, 1]");
    if (static_cast<int>(z.size()) != target.dimension())
        throw DimensionError("latent and target dimensions differ");

    const double lam = schedule.lambda(t);
    const double a = 1.0 - lam;
    const double s2 = target.stddev * target.stddev;
    const double d = static_cast<double>(z.size());

    struct Comp {
        double weight;
        const Vec* mean;
    };
    std::vector<Comp> comps;
    if (target.mixture.empty()) {
        comps.push_back({1.0, &target.mean});
    } else {
        for (const auto& c : target.mixture) comps.push_back({c.weight, &c.mean});
    }

    // Responsibilities via the marginal density of z under each component:
    // Z_t | comp i ~ N(a mu_i, D I) with D = a^2 s^2 + lam^2.
    const double D = a * a * s2 + lam * lam;
    std::vector<double> logd(comps.size());
    double logmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < comps.size(); ++i) {
        double q = 0.0;
        for (std::size_t k = 0; k < z.size(); ++k) {
            double r = z[k] - a * (*comps[i].mean)[k];
            q += r * r;
        }
        logd[i] = std::log(comps[i].weight) -
                  0.5 * (q / D + d * std::log(2.0 * std::numbers::pi * D));
        logmax = std::max(logmax, logd[i]);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        logd[i] = std::exp(logd[i] - logmax);
        norm += logd[i];
    }

    // Per component: E[X0|z] = mu + (a s^2 / D)(z - a mu), E[eps|z] = (lam / D)(z - a mu).
    Vec v = zeros(z.size());
    for (std::size_t i = 0; i < comps.size(); ++i) {
        double r = logd[i] / norm;
        if (r == 0.0) continue;
        const Vec& mu = *comps[i].mean;
        for (std::size_t k = 0; k < z.size(); ++k) {
            double centered = z[k] - a * mu[k];
            double e_x0 = mu[k] + (a * s2 / D) * centered;
            double e_eps = (lam / D) * centered;
            v[k] += r * (e_eps - e_x0);
        }
    }
    return v;
}

Vec guided_velocity(const Vec& z, double t, const PromptTarget& cond, double guidance_scale,
                    const NoiseSchedule& schedule) {
    Vec vc = conditional_velocity(z, t, cond, schedule);
    if (guidance_scale == 1.0) return vc;
    PromptTarget uncond = PromptTarget::standard_normal(static_cast<int>(z.size()));
    Vec vu = conditional_velocity(z, t, uncond, schedule);
    if (guidance_scale == 0.0) return vu;
    Vec out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        out[i] = vu[i] + guidance_scale * (vc[i] - vu[i]);
    return out;
}

}  // namespace semflow
