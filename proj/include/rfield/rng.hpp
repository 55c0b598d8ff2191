#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "rfield/detail/normal.hpp"
#include "rfield/detail/philox.hpp"

namespace rfield {

namespace detail {

constexpr std::uint32_t stream_tag_seed = 0x5eed5eedu; // member seed derivation
constexpr std::uint32_t stream_tag_mode = 0x6d6f6465u; // lattice mode noise

// 52-bit uniform on (0,1); both additions below are exact in doubles, so the
// range is exactly [2^-53, 1 - 2^-53] and the normal quantile is always
// finite. (A 53-bit mantissa plus half-step offset rounds to 1.0 at the top
// word under ties-to-even.)
inline double u01(std::uint64_t u) {
    return double(u >> 12) * 0x1p-52 + 0x1p-53;
}

// Counter layout (block, mode lo, mode hi, tag) keyed by the member seed.
// Every uniform is a pure function of that tuple, so a sample does not depend
// on evaluation order, thread count, or which other modes were drawn.
inline std::array<std::uint64_t, 2> stream_u64(std::uint64_t member_seed,
                                               std::uint64_t mode,
                                               std::uint32_t block,
                                               std::uint32_t tag) {
    const philox_ctr c{block, static_cast<std::uint32_t>(mode),
                       static_cast<std::uint32_t>(mode >> 32), tag};
    const philox_key k{static_cast<std::uint32_t>(member_seed),
                       static_cast<std::uint32_t>(member_seed >> 32)};
    const auto r = philox4x32(c, k);
    return {(std::uint64_t(r[1]) << 32) | r[0], (std::uint64_t(r[3]) << 32) | r[2]};
}

// Exactly one counter block per pair of standard normals (inverse CDF), so
// the draw count per mode is fixed.
inline std::pair<double, double> normal_pair(std::uint64_t member_seed,
                                             std::uint64_t mode,
                                             std::uint32_t block,
                                             std::uint32_t tag) {
    const auto u = stream_u64(member_seed, mode, block, tag);
    return {normal_quantile(u01(u[0])), normal_quantile(u01(u[1]))};
}

} // namespace detail

// Ensemble member m under master seed s draws with key derive_member_seed(s, m);
// member streams are decoupled, so any subset of members can be generated in
// any order (or on any thread) with identical results.
inline std::uint64_t derive_member_seed(std::uint64_t master_seed, std::uint64_t member) {
    const detail::philox_ctr c{static_cast<std::uint32_t>(member),
                               static_cast<std::uint32_t>(member >> 32), 0u,
                               detail::stream_tag_seed};
    const detail::philox_key k{static_cast<std::uint32_t>(master_seed),
                               static_cast<std::uint32_t>(master_seed >> 32)};
    const auto r = detail::philox4x32(c, k);
    return (std::uint64_t(r[1]) << 32) | r[0];
}

} // namespace rfield
