// Independent reference implementations the tests check the library against.
// Everything here is deliberately written from first principles (Monte Carlo,
// textbook DP, exhaustive search) rather than calling into the library code
// it is meant to verify.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "semflow/rng.hpp"
#include "semflow/scene_graph.hpp"
#include "semflow/vec.hpp"
#include "semflow/velocity.hpp"

namespace oracles {

using semflow::Vec;

// Monte-Carlo estimate of E[eps - X0 | Z_t = z] for a single-Gaussian prompt
// target via self-normalized importance sampling: X0 ~ N(mu, s^2 I) proposals
// weighted by the likelihood N(z; (1-t) x, t^2 I). Given Z_t = z and X0 = x,
// eps is determined: eps = (z - (1-t) x) / t.
inline Vec mc_conditional_velocity(const Vec& z, double t, const Vec& mu, double stddev,
                                   int n_samples, std::uint64_t seed) {
    const double a = 1.0 - t;
    const std::size_t d = z.size();
    semflow::Rng rng(seed);
    std::vector<double> logw(static_cast<std::size_t>(n_samples));
    std::vector<Vec> xs(static_cast<std::size_t>(n_samples));
    double logmax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i) {
        Vec x(d);
        for (std::size_t k = 0; k < d; ++k) x[k] = mu[k] + stddev * rng.normal();
        double q = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double r = z[k] - a * x[k];
            q += r * r;
        }
        logw[static_cast<std::size_t>(i)] = -0.5 * q / (t * t);
        logmax = std::max(logmax, logw[static_cast<std::size_t>(i)]);
        xs[static_cast<std::size_t>(i)] = std::move(x);
    }
    Vec num(d, 0.0);
    double den = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        double w = std::exp(logw[static_cast<std::size_t>(i)] - logmax);
        den += w;
        const Vec& x = xs[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < d; ++k) {
            double eps = (z[k] - a * x[k]) / t;
            num[k] += w * (eps - x[k]);
        }
    }
    for (std::size_t k = 0; k < d; ++k) num[k] /= den;
    return num;
}

// Token-level Levenshtein distance (insert/delete/substitute all cost 1).
inline int levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
    for (std::size_t i = 0; i <= n; ++i) dp[i][0] = static_cast<int>(i);
    for (std::size_t j = 0; j <= m; ++j) dp[0][j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= m; ++j)
            dp[i][j] = std::min({dp[i - 1][j] + 1, dp[i][j - 1] + 1,
                                 dp[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    return dp[n][m];
}

// Minimal patch-op count between two small graphs by brute force over all
// injective target-to-source node assignments, counting ops directly.
inline int min_patch_ops(const semflow::SceneGraph& src, const semflow::SceneGraph& tar) {
    const std::size_t ns = src.nodes.size(), nt = tar.nodes.size();
    std::vector<int> assign(nt, -1);
    std::vector<bool> used(ns, false);
    int best = std::numeric_limits<int>::max();

    auto cost_of = [&]() {
        int cost = 0;
        std::map<int, int> id_map;
        for (std::size_t ti = 0; ti < nt; ++ti) {
            if (assign[ti] < 0) {
                cost += 1;  // add
                continue;
            }
            const auto& s = src.nodes[static_cast<std::size_t>(assign[ti])];
            const auto& t = tar.nodes[ti];
            id_map[s.id] = t.id;
            if (s.name != t.name) cost += 1;
            std::set<std::string> slots;
            for (const auto& [k, _] : s.attributes) slots.insert(k);
            for (const auto& [k, _] : t.attributes) slots.insert(k);
            for (const auto& slot : slots) {
                auto si = s.attributes.find(slot);
                auto ti2 = t.attributes.find(slot);
                bool sh = si != s.attributes.end(), th = ti2 != t.attributes.end();
                if (sh != th || (sh && th && si->second != ti2->second)) cost += 1;
            }
        }
        for (std::size_t si = 0; si < ns; ++si)
            if (!used[si]) cost += 1;  // remove
        int surviving = 0;
        for (const auto& e : src.edges) {
            auto ai = id_map.find(e.subject);
            auto bi = id_map.find(e.object);
            if (ai == id_map.end() || bi == id_map.end()) continue;
            semflow::Edge mapped{ai->second, e.relation, bi->second};
            if (std::find(tar.edges.begin(), tar.edges.end(), mapped) != tar.edges.end())
                ++surviving;
        }
        cost += static_cast<int>(src.edges.size()) - surviving;
        cost += static_cast<int>(tar.edges.size()) - surviving;
        return cost;
    };

    auto rec = [&](auto&& self, std::size_t ti) -> void {
        if (ti == nt) {
            best = std::min(best, cost_of());
            return;
        }
        assign[ti] = -1;
        self(self, ti + 1);
        for (std::size_t si = 0; si < ns; ++si) {
            if (used[si]) continue;
            used[si] = true;
            assign[ti] = static_cast<int>(si);
            self(self, ti + 1);
            used[si] = false;
            assign[ti] = -1;
        }
    };
    rec(rec, 0);
    return best;
}

// Closed-form Euler integration for a single-Gaussian target in 1-D.
// The conditional velocity is affine in z, v(z, t) = c1(t) (z - a mu) - mu
// with c1 = (t - a s^2) / (a^2 s^2 + t^2), so each Euler step is an affine
// map; composing the maps gives the exact discrete flow.
struct Affine {
    double scale = 1.0;
    double offset = 0.0;

    double operator()(double z) const { return scale * z + offset; }
};

inline Affine euler_step_affine(double t, double mu, double stddev) {
    const double a = 1.0 - t;
    const double s2 = stddev * stddev;
    const double D = a * a * s2 + t * t;
    const double c1 = (t - a * s2) / D;
    // v(z) = c1 z - c1 a mu - mu
    return Affine{c1, -c1 * a * mu - mu};
}

inline Affine compose(const Affine& outer, const Affine& inner) {
    return Affine{outer.scale * inner.scale, outer.scale * inner.offset + outer.offset};
}

// z <- z - (1/T) v(z, t_k) over left endpoints t_k = 1 - k/T, k = 0..T-1.
inline Affine composed_flow_map(int steps, double mu, double stddev) {
    Affine total{1.0, 0.0};
    for (int k = 0; k < steps; ++k) {
        double t = 1.0 - static_cast<double>(k) / steps;
        Affine v = euler_step_affine(t, mu, stddev);
        Affine step{1.0 - v.scale / steps, -v.offset / steps};
        total = compose(step, total);
    }
    return total;
}

// Guided velocity for a single-Gaussian prompt in 1-D as an affine map of z:
//   v_cond(z)   = c1 (z - a mu) - mu          (c1 as above)
//   v_uncond(z) = c0 z                        (mu = 0, s = 1)
//   guided      = v_uncond + scale (v_cond - v_uncond)
inline Affine guided_affine(double t, double mu, double stddev, double scale) {
    Affine vc = euler_step_affine(t, mu, stddev);
    Affine vu = euler_step_affine(t, 0.0, 1.0);
    return Affine{vu.scale + scale * (vc.scale - vu.scale),
                  vu.offset + scale * (vc.offset - vu.offset)};
}

// Independent 1-D replay of the edit recursion from recorded source latents:
//   z_tar(t) = z_edit + z_src(t) - z0
//   z_edit  += gain_k * (-guided_tar(z_tar) + guided_src(z_src))
// Returns the z_edit sequence aligned with the inputs.
inline std::vector<double> replay_edit_1d(double z0, const std::vector<double>& z_src_t,
                                          const std::vector<double>& t_eval,
                                          const std::vector<double>& gains, double mu_src,
                                          double mu_tar, double stddev, double scale_src,
                                          double scale_tar) {
    std::vector<double> out;
    double z_edit = z0;
    for (std::size_t k = 0; k < z_src_t.size(); ++k) {
        Affine src = guided_affine(t_eval[k], mu_src, stddev, scale_src);
        Affine tar = guided_affine(t_eval[k], mu_tar, stddev, scale_tar);
        double z_tar = z_edit + z_src_t[k] - z0;
        double dv = -tar(z_tar) + src(z_src_t[k]);
        z_edit += gains[k] * dv;
        out.push_back(z_edit);
    }
    return out;
}

}  // namespace oracles
