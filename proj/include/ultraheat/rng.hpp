#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ultraheat {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent random stream keyed by (seed, index, tag).
///
/// Streams are derived by hashing the key, so the stream a path receives does
/// not depend on which worker simulates it or in what order. A stream is owned
/// by exactly one consumer; it is not thread-safe.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t index = 0, std::uint64_t tag = 0)
        : engine_(derive(seed, index, tag)) {}

    /// Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on {0, ..., bound - 1}.
    std::uint64_t below(std::uint64_t bound) {
        std::uniform_int_distribution<std::uint64_t> d(0, bound - 1);
        return d(engine_);
    }

    /// Exponential with the given rate (> 0).
    double exponential(double rate) {
        // 1 - u lies in (0, 1], so the log is finite.
        return -std::log(1.0 - uniform()) / rate;
    }

private:
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t index, std::uint64_t tag) {
        std::uint64_t h = splitmix64(seed);
        h = splitmix64(h ^ index);
        return splitmix64(h ^ (tag * 0xd1b54a32d192ed03ULL));
    }

    std::mt19937_64 engine_;
};

}  // namespace ultraheat
