#pragma once

#include <array>
#include <cstdint>

namespace rfield::detail {

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw,
// "Parallel random numbers: as easy as 1, 2, 3", SC'11). A pure function of
// (counter, key); distinct counters give independent 128-bit blocks, which
// is what makes per-mode random streams order- and thread-independent.
// Known-answer vectors from the reference implementation are pinned in the
// test suite.
struct philox_ctr {
    std::uint32_t c0, c1, c2, c3;
};

struct philox_key {
    std::uint32_t k0, k1;
};

inline std::array<std::uint32_t, 4> philox4x32(philox_ctr c, philox_key k) {
    constexpr std::uint32_t mul0 = 0xD2511F53u;
    constexpr std::uint32_t mul1 = 0xCD9E8D57u;
    constexpr std::uint32_t weyl0 = 0x9E3779B9u;
    constexpr std::uint32_t weyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round != 0) {
            k.k0 += weyl0;
            k.k1 += weyl1;
        }
        const std::uint64_t p0 = std::uint64_t(mul0) * c.c0;
        const std::uint64_t p1 = std::uint64_t(mul1) * c.c2;
        c = philox_ctr{std::uint32_t(p1 >> 32) ^ c.c1 ^ k.k0, std::uint32_t(p1),
                       std::uint32_t(p0 >> 32) ^ c.c3 ^ k.k1, std::uint32_t(p0)};
    }
    return {c.c0, c.c1, c.c2, c.c3};
}

} // namespace rfield::detail
