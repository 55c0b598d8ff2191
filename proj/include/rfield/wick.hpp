#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "rfield/detail/exact_sum.hpp"
#include "rfield/detail/linalg.hpp"
#include "rfield/errors.hpp"
#include "rfield/smearing.hpp"

namespace rfield {

// (2n-1)!! pairings at order 2n; 10395 at the cap, refusal beyond.
inline constexpr std::size_t wick_order_cap = 12;

namespace detail {

// Enumerates perfect matchings of positions [0, size): the lowest unused
// position is paired with every later unused one. Each matching's product is
// therefore built in ascending-first-position order, and the matching sum is
// exactly rounded, so any enumerator following the same canonical convention
// reproduces the value bitwise.
inline void wick_pairings(const covariance_matrix& c, const std::vector<std::size_t>& idx,
                          std::vector<char>& used, std::size_t start, double prod,
                          exact_sum& total) {
    std::size_t p0 = start;
    while (p0 < idx.size() && used[p0]) ++p0;
    if (p0 == idx.size()) {
        total.add(prod);
        return;
    }
    used[p0] = 1;
    for (std::size_t p = p0 + 1; p < idx.size(); ++p) {
        if (used[p]) continue;
        used[p] = 1;
        wick_pairings(c, idx, used, p0 + 1, prod * c.at(idx[p0], idx[p]), total);
        used[p] = 0;
    }
    used[p0] = 0;
}

} // namespace detail

// E[chi_{i1} ... chi_{ik}] for zero-mean jointly Gaussian observables:
// odd order is 0, even order the sum over perfect matchings of products of
// covariance entries. Indices are sorted first, so the value is exactly
// permutation-invariant in the index multiset.
inline double wick_moment(const covariance_matrix& c, std::span<const std::size_t> indices) {
    if (indices.size() > wick_order_cap)
        throw unsupported_order_error("wick_moment: order exceeds the pairing cap (12); "
                                      "the double-factorial pairing count is exact "
                                      "enumeration only");
    for (std::size_t i : indices)
        if (i >= c.n) throw domain_error("wick_moment: observable index out of range");
    if (indices.size() % 2 != 0) return 0.0;
    if (indices.empty()) return 1.0;
    std::vector<std::size_t> idx(indices.begin(), indices.end());
    std::sort(idx.begin(), idx.end());
    std::vector<char> used(idx.size(), 0);
    exact_sum total;
    detail::wick_pairings(c, idx, used, 0, 1.0, total);
    return total.value();
}

// E[e^{i lambda . chi}] = exp(-1/2 lambda^T C lambda): real and positive for
// PSD C, 1 at lambda = 0.
inline std::complex<double> char_function(const covariance_matrix& c,
                                          std::span<const double> lambda) {
    if (lambda.size() != c.n)
        throw domain_error("char_function: lambda dimension must match covariance");
    double q = 0.0;
    for (std::size_t i = 0; i < c.n; ++i)
        for (std::size_t j = 0; j < c.n; ++j) q += lambda[i] * c.at(i, j) * lambda[j];
    return {std::exp(-0.5 * q), 0.0};
}

// Zero-mean multivariate Gaussian density. Requires strict positive
// definiteness: smallest eigenvalue > 1e-12 x largest.
inline double joint_density(const covariance_matrix& c, std::span<const double> values) {
    if (c.n == 0) throw domain_error("joint_density: empty covariance");
    if (values.size() != c.n)
        throw domain_error("joint_density: value dimension must match covariance");
    const auto eig = detail::sym_eigenvalues(c.n, c.entries);
    if (!(eig.back() > 0.0) || eig.front() <= 1e-12 * eig.back())
        throw singular_covariance_error("joint_density: covariance is numerically "
                                        "singular; reduce the observable set");
    std::vector<double> l;
    if (!detail::cholesky(c.n, c.entries, l))
        throw singular_covariance_error("joint_density: covariance is not positive "
                                        "definite");
    std::vector<double> y(values.begin(), values.end());
    detail::solve_lower(c.n, l, y);
    double q = 0.0;
    double log_det_root = 0.0;
    for (std::size_t i = 0; i < c.n; ++i) {
        q += y[i] * y[i];
        log_det_root += std::log(l[i * c.n + i]);
    }
    return std::exp(-0.5 * q - log_det_root -
                    0.5 * double(c.n) * std::log(2.0 * std::numbers::pi));
}

} // namespace rfield
