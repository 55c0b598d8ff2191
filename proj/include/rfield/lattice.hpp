#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include "rfield/errors.hpp"

namespace rfield {

// Periodic cubic lattice: n sites per axis at spacing a, box length L = n a.
// Mode n_vec carries wavenumber k = 2 pi n_vec / (n a) with integer
// components folded to (-n/2, n/2]. n must be a power of two (the synthesis
// uses a radix-2 transform).
struct lattice {
    int dimension = 1;
    std::size_t n = 0;
    double spacing = 1.0;

    friend bool operator==(const lattice&, const lattice&) = default;
};

inline void validate(const lattice& lat) {
    if (lat.dimension < 1 || lat.dimension > 3)
        throw domain_error("lattice: dimension must be 1, 2, or 3");
    if (lat.n < 4 || (lat.n & (lat.n - 1)) != 0)
        throw domain_error("lattice: sites per axis must be a power of two >= 4");
    if (!(lat.spacing > 0.0) || !std::isfinite(lat.spacing))
        throw domain_error("lattice: spacing must be finite and > 0");
}

inline std::size_t site_count(const lattice& lat) {
    std::size_t s = 1;
    for (int i = 0; i < lat.dimension; ++i) s *= lat.n;
    return s;
}

inline double box_length(const lattice& lat) { return double(lat.n) * lat.spacing; }

inline double cell_volume(const lattice& lat) {
    return std::pow(lat.spacing, lat.dimension);
}

inline double box_volume(const lattice& lat) {
    return std::pow(box_length(lat), lat.dimension);
}

namespace detail {

// Fold grid index i in [0, n) to the signed mode integer in (-n/2, n/2].
inline long long signed_mode(std::size_t n, std::size_t i) {
    return i <= n / 2 ? (long long)i : (long long)i - (long long)n;
}

inline void decode_site(const lattice& lat, std::size_t flat, std::size_t idx[3]) {
    for (int a = lat.dimension - 1; a >= 0; --a) {
        idx[a] = flat % lat.n;
        flat /= lat.n;
    }
}

} // namespace detail

// Wavenumber components of flat mode index; returns |k|.
inline double mode_wavenumber(const lattice& lat, std::size_t flat, double k[3]) {
    std::size_t idx[3] = {0, 0, 0};
    detail::decode_site(lat, flat, idx);
    const double step = 2.0 * std::numbers::pi / box_length(lat);
    double k2 = 0.0;
    for (int a = 0; a < lat.dimension; ++a) {
        k[a] = step * double(detail::signed_mode(lat.n, idx[a]));
        k2 += k[a] * k[a];
    }
    return std::sqrt(k2);
}

// Flat index of the mode at -k (per-axis index negation mod n).
inline std::size_t conjugate_mode(const lattice& lat, std::size_t flat) {
    std::size_t idx[3] = {0, 0, 0};
    detail::decode_site(lat, flat, idx);
    std::size_t out = 0;
    for (int a = 0; a < lat.dimension; ++a) {
        const std::size_t neg = idx[a] == 0 ? 0 : lat.n - idx[a];
        out = out * lat.n + neg;
    }
    return out;
}

// Self-conjugate modes (every axis index in {0, n/2}) must carry real
// amplitudes; there are 2^dimension of them.
inline bool is_self_conjugate(const lattice& lat, std::size_t flat) {
    return conjugate_mode(lat, flat) == flat;
}

} // namespace rfield
