#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "semflow/errors.hpp"

namespace semflow {

using Vec = std::vector<double>;

inline void check_same_dim(const Vec& a, const Vec& b, const char* where) {
    if (a.size() != b.size()) {
        throw DimensionError(std::string(where) + ": dimension mismatch (" +
                             std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
}

inline double dot(const Vec& a, const Vec& b) {
    check_same_dim(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline bool is_zero(const Vec& a) {
    for (double x : a)
        if (x != 0.0) return false;
    return true;
}

// cos(a, b); both vectors must have nonzero norm.
inline double cosine(const Vec& a, const Vec& b) {
    double na = norm(a), nb = norm(b);
    if (na == 0.0 || nb == 0.0) throw DomainError("cosine: zero-norm vector");
    return dot(a, b) / (na * nb);
}

inline Vec add(const Vec& a, const Vec& b) {
    check_same_dim(a, b, "add");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    check_same_dim(a, b, "sub");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scale(const Vec& a, double s) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

// r += s * a
inline void axpy(Vec& r, double s, const Vec& a) {
    check_same_dim(r, a, "axpy");
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += s * a[i];
}

inline Vec normalized(const Vec& a) {
    double n = norm(a);
    if (n == 0.0) throw DomainError("normalized: zero-norm vector");
    return scale(a, 1.0 / n);
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
    check_same_dim(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

inline Vec zeros(std::size_t n) { return Vec(n, 0.0); }

}  // namespace semflow
