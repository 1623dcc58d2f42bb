#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace uavtb {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derive the seed of a named substream. A master seed plus a stream name
/// (and optional index) selects an independent stream, so adding a new
/// consumer elsewhere never perturbs existing draws.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::uint64_t index = 0) {
    std::uint64_t state = master ^ fnv1a64(stream);
    std::uint64_t a = splitmix64_next(state);
    state ^= index * 0x9e3779b97f4a7c15ULL;
    std::uint64_t b = splitmix64_next(state);
    return a ^ (b + 0x9e3779b97f4a7c15ULL);
}

/// Named substream of a master seed.
class RngStream {
  public:
    RngStream(std::uint64_t master, std::string_view stream, std::uint64_t index = 0)
        : engine_(derive_seed(master, stream, index)) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        return std::normal_distribution<double>(mean, stddev)(engine_);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

} // namespace uavtb
