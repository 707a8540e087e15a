#pragma once
#include <cstdint>
#include <random>

namespace distspec {

/// splitmix64 finalizer; decorrelates nearby seed values.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent per-stream seed from a global seed and a stream id
/// (e.g. a site id), so concurrent sites draw from disjoint RNG streams.
inline std::uint64_t derive_stream_seed(std::uint64_t global_seed, std::uint64_t stream_id) {
    return mix64(mix64(global_seed) ^ mix64(stream_id + 0x5851f42d4c957f2dULL));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64{mix64(seed)};
}

}  // namespace distspec
