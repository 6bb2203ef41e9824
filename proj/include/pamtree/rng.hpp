#pragma once
// Counter-style RNG: splitmix64 streams derived by hashing (seed, label, index).
// A stream's draws depend only on its key, never on traversal or thread order.

#include <cmath>
#include <cstdint>
#include <string_view>

#include "pamtree/common.hpp"

namespace pamtree {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
    return splitmix64(x);
}

class RngStream {
  public:
    explicit RngStream(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform on [0,1) with 53 bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1); never returns 0 so log() stays finite.
    double next_unit_open() {
        double u = next_unit();
        return u == 0.0 ? 0x1.0p-53 : u;
    }

    double next_exp(double rate) { return -std::log(next_unit_open()) / rate; }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t next_below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

  private:
    std::uint64_t state_;
};

// Independent named stream for (seed, label, index).
inline RngStream derive_stream(std::uint64_t seed, std::string_view label, std::uint64_t index = 0) {
    std::uint64_t h = fnv1a(label.data(), label.size(), 0xcbf29ce484222325ull ^ seed);
    h ^= 0x9e3779b97f4a7c15ull + index;
    std::uint64_t s = h;
    splitmix64(s);
    splitmix64(s);
    return RngStream(s);
}

}  // namespace pamtree
