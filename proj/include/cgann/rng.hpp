#pragma once

#include <cstdint>
#include <random>

namespace cgann {

// splitmix64 finalizer; used both for key derivation and engine seeding.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

class RngStream;

// Hierarchical seed key. fold(tag) derives a child key; every randomized
// step in the engine owns a key derived from the master seed and its
// position in the run (algorithm, level, generation, cell, ...), so cell
// updates draw from streams that do not depend on visit order or thread
// count.
class RngKey {
  public:
    static constexpr RngKey root(std::uint64_t seed) noexcept {
        return RngKey(mix64(seed ^ 0xA5A5A5A55A5A5A5AULL));
    }

    constexpr RngKey fold(std::uint64_t tag) const noexcept {
        return RngKey(mix64(key_ + 0x9E3779B97F4A7C15ULL * (tag + 1)));
    }

    constexpr std::uint64_t value() const noexcept { return key_; }

    RngStream stream() const;

  private:
    explicit constexpr RngKey(std::uint64_t key) noexcept : key_(key) {}
    std::uint64_t key_;
};

// Deterministic random stream. Draw helpers avoid the standard
// distributions so that a given seed produces the same values on every
// platform and standard library.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // 53-bit uniform in [0, 1)
    double canonical() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * canonical(); }

    // unbiased-enough bounded draw (Lemire multiply-shift), n > 0
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // inclusive integer range
    long long uniform_int(long long lo, long long hi) {
        return lo + static_cast<long long>(index(static_cast<std::size_t>(hi - lo + 1)));
    }

    bool coin() { return (next_u64() & 1ULL) != 0; }

    bool bernoulli(double p) { return canonical() < p; }

  private:
    std::mt19937_64 engine_;
};

inline RngStream RngKey::stream() const { return RngStream(key_); }

}  // namespace cgann
