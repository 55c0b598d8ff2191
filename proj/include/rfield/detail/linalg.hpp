#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rfield/errors.hpp"

namespace rfield::detail {

// Dense symmetric helpers for the small matrices this library handles
// (observable counts of a few dozen at most). Row-major storage.

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations. Ascending
// order. Convergence to ~1e-15 * frobenius norm; plenty for the
// positive-definiteness thresholds used here.
inline std::vector<double> sym_eigenvalues(std::size_t n, std::vector<double> a) {
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    if (n == 0) return {};
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        double diag = 0.0;
        for (std::size_t i = 0; i < n; ++i) diag += at(i, i) * at(i, i);
        if (off <= 1e-30 * (diag + off) || off == 0.0) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
    for (std::size_t i = 1; i < n; ++i) { // insertion sort, n is tiny
        double v = eig[i];
        std::size_t j = i;
        while (j > 0 && eig[j - 1] > v) { eig[j] = eig[j - 1]; --j; }
        eig[j] = v;
    }
    return eig;
}

// Cholesky factor L (lower) of a symmetric positive definite matrix.
// Returns false if a nonpositive pivot appears.
inline bool cholesky(std::size_t n, const std::vector<double>& a, std::vector<double>& l) {
    l.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
            if (i == j) {
                if (s <= 0.0) return false;
                l[i * n + i] = std::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    return true;
}

// Solve L y = b in place (lower triangular, from cholesky()).
inline void solve_lower(std::size_t n, const std::vector<double>& l, std::vector<double>& b) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * b[k];
        b[i] = s / l[i * n + i];
    }
}

} // namespace rfield::detail
