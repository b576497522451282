#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random streams: Philox-2x64-10. A stream is identified by
// (key, stream_id); the block counter is (stream_id, draw_index), so streams
// with distinct ids can never overlap no matter how many draws each takes.
// Everything is pure integer arithmetic on fixed-width words, hence
// reproducible across platforms and thread schedules.

namespace sis {

namespace philox {

inline constexpr std::uint64_t kMultiplier = 0xD2B74407B1CE6E93ull;
inline constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;  // golden ratio

struct Block {
    std::uint64_t x0;
    std::uint64_t x1;
};

inline std::uint64_t mulhi64(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) * b) >> 64);
}

// 10 rounds of the 2x64 bijection on counter (c0, c1) under `key`.
inline Block encrypt(std::uint64_t c0, std::uint64_t c1, std::uint64_t key) {
    std::uint64_t x0 = c0, x1 = c1, k = key;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t hi = mulhi64(kMultiplier, x0);
        const std::uint64_t lo = kMultiplier * x0;
        x0 = hi ^ k ^ x1;
        x1 = lo;
        k += kWeyl;
    }
    return {x0, x1};
}

}  // namespace philox

// One Gaussian stream. Each draw consumes one counter value and runs one
// Box-Muller transform (the sine half is discarded so that draw k of a
// stream is always block k; coupling tests rely on that alignment).
class PathRng {
  public:
    PathRng(std::uint64_t key, std::uint64_t stream_id)
        : key_(key), stream_id_(stream_id), draw_(0) {}

    // Standard normal via Box-Muller on one Philox block.
    double standard_normal() {
        const philox::Block b = philox::encrypt(stream_id_, draw_++, key_);
        // u1 in (0, 1] so log(u1) is finite; u2 in [0, 1).
        const double u1 = ((b.x0 >> 11) + 1) * 0x1.0p-53;
        const double u2 = (b.x1 >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::uint64_t draws() const { return draw_; }

  private:
    std::uint64_t key_;
    std::uint64_t stream_id_;
    std::uint64_t draw_;
};

// Brownian increment over a step of length dt: N(0, dt).
inline double brownian_increment(PathRng& rng, double dt) {
    return rng.standard_normal() * std::sqrt(dt);
}

}  // namespace sis
