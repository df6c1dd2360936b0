#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "semflow/velocity.hpp"

namespace semflow {

// Data-parallel kernels with a serial reference implementation. Every item
// owns an RNG stream derived from (seed, index) and writes a preallocated
// slot, so the parallel results are bitwise identical to the serial ones for
// any thread count.

struct FlowBatch {
    int n = 0;
    int dim = 0;
    std::vector<double> data;  // row-major, n x dim

    double* row(int i) { return data.data() + static_cast<std::size_t>(i) * dim; }
    const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * dim; }
};

// Draws n standard-normal samples and integrates the conditional velocity
// field from t = 1 to t = 0 with plain Euler steps (z <- z - v / steps,
// velocities at left endpoints, so t = 0 is never queried).
FlowBatch integrate_flow_serial(const PromptTarget& target, int steps, int n,
                                std::uint64_t seed);
FlowBatch integrate_flow_parallel(const PromptTarget& target, int steps, int n,
                                  std::uint64_t seed);

// Work pool: runs fn(i) for i in [0, n) with per-item isolated state. The
// parallel variant uses OpenMP when available and degrades to serial.
void for_each_index_serial(int n, const std::function<void(int)>& fn);
void for_each_index_parallel(int n, const std::function<void(int)>& fn);

// Column means and (unbiased) variances of a batch.
void batch_mean_var(const FlowBatch& batch, Vec& mean, Vec& var);

int batch_max_threads();

}  // namespace semflow
