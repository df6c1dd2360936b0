#include "semflow/batch.hpp"

#include <atomic>
#include <exception>

#include "semflow/errors.hpp"
#include "semflow/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace semflow {

namespace {

void integrate_one(FlowBatch& batch, int i, const PromptTarget& target, int steps,
                   std::uint64_t seed) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    Vec z = rng.normal_vec(batch.dim);
    for (int k = 0; k < steps; ++k) {
        double t = 1.0 - static_cast<double>(k) / steps;
        Vec v = conditional_velocity(z, t, target);
        axpy(z, -1.0 / steps, v);
    }
    double* out = batch.row(i);
    for (int d = 0; d < batch.dim; ++d) out[d] = z[static_cast<std::size_t>(d)];
}

FlowBatch make_batch(const PromptTarget& target, int steps, int n) {
    target.validate();
    if (steps < 1) throw ConfigError("flow integration needs at least one step");
    if (n < 0) throw ConfigError("negative sample count");
    FlowBatch batch;
    batch.n = n;
    batch.dim = target.dimension();
    batch.data.assign(static_cast<std::size_t>(n) * batch.dim, 0.0);
    return batch;
}

}  // namespace

FlowBatch integrate_flow_serial(const PromptTarget& target, int steps, int n,
                                std::uint64_t seed) {
    FlowBatch batch = make_batch(target, steps, n);
    for (int i = 0; i < n; ++i) integrate_one(batch, i, target, steps, seed);
    return batch;
}

FlowBatch integrate_flow_parallel(const PromptTarget& target, int steps, int n,
                                  std::uint64_t seed) {
    FlowBatch batch = make_batch(target, steps, n);
    for_each_index_parallel(n, [&](int i) { integrate_one(batch, i, target, steps, seed); });
    return batch;
}

void for_each_index_serial(int n, const std::function<void(int)>& fn) {
    for (int i = 0; i < n; ++i) fn(i);
}

void for_each_index_parallel(int n, const std::function<void(int)>& fn) {
#ifdef _OPENMP
    // Exceptions may not cross the parallel region; the first one is kept and
    // rethrown after the join.
    std::exception_ptr first_error = nullptr;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            fn(i);
        } catch (...) {
            bool expected = false;
            if (failed.compare_exchange_strong(expected, true))
                first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
#else
    for_each_index_serial(n, fn);
#endif
}

void batch_mean_var(const FlowBatch& batch, Vec& mean, Vec& var) {
    if (batch.n < 2) throw DomainError("mean/variance needs at least two samples");
    mean = zeros(static_cast<std::size_t>(batch.dim));
    var = zeros(static_cast<std::size_t>(batch.dim));
    for (int i = 0; i < batch.n; ++i) {
        const double* row = batch.row(i);
        for (int d = 0; d < batch.dim; ++d) mean[static_cast<std::size_t>(d)] += row[d];
    }
    for (int d = 0; d < batch.dim; ++d) mean[static_cast<std::size_t>(d)] /= batch.n;
    for (int i = 0; i < batch.n; ++i) {
        const double* row = batch.row(i);
        for (int d = 0; d < batch.dim; ++d) {
            double r = row[d] - mean[static_cast<std::size_t>(d)];
            var[static_cast<std::size_t>(d)] += r * r;
        }
    }
    for (int d = 0; d < batch.dim; ++d) var[static_cast<std::size_t>(d)] /= (batch.n - 1);
}

int batch_max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace semflow
