#pragma once

#include <cstdint>

namespace rqsim {

// SplitMix64 one-round (Steele / Vigna).
inline std::uint64_t splitmix64(std::uint64_t x) {
    static constexpr std::uint64_t PHI = 0x9E3779B97F4A7C15ULL;
    x = x + PHI;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
    static constexpr std::uint64_t PHI = 0x9E3779B97F4A7C15ULL;
    return splitmix64(base_seed + index * PHI);
}

// Counter-based uniform stream: variate i is a pure function of
// (seed, stream_id, i), so any position can be reached without generating the
// ones before it, replications never overlap, and a stream can be replayed
// exactly for common-random-number pairing. The antithetic flag reflects every
// uniform to 1 - u.
struct RandomStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::uint64_t position = 0;
    bool antithetic = false;

    RandomStream() = default;
    RandomStream(std::uint64_t seed, std::uint64_t stream_id, bool antithetic = false)
        : seed(seed), stream_id(stream_id), antithetic(antithetic) {}

    // Strictly inside (0, 1), so inversion formulas and their antithetic
    // mirrors never see 0 or 1.
    double next_uniform() {
        std::uint64_t bits = splitmix64(derive_seed(seed, stream_id) ^
                                        splitmix64(position * 0xD6E8FEB86659FD93ULL + 0x2545F4914F6CDD1DULL));
        ++position;
        double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
        return antithetic ? 1.0 - u : u;
    }
};

// Substream layout: replication r, role s -> one independent stream. Role 0
// is the interarrival process, role 1 + n the service process of node n.
inline constexpr std::uint64_t kRoleStride = 256;

inline RandomStream substream(std::uint64_t seed, std::uint64_t replication, std::uint64_t role,
                              bool antithetic = false) {
    return RandomStream(seed, replication * kRoleStride + role, antithetic);
}

}  // namespace rqsim
