#pragma once
// Shared error types, version constants and small numeric helpers.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pamtree {

inline constexpr const char* kCodeVersion = "pamtree 0.1.0";
inline constexpr int kSchemaVersion = 1;

// Bad arguments or malformed inputs (CLI exit code 2).
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A configured cap was hit (CLI exit code 3).
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numeric routine failed to converge or produced non-finite values (CLI exit code 1).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pairwise summation with a fixed reduction tree. The result depends only on
// the order of `values`, never on thread count, so artifacts stay bit-exact.
inline double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& values) {
    return pairwise_sum(std::span<const double>(values));
}

// FNV-1a, used for config hashes and cache keys.
inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ull) {
    return fnv1a(s.data(), s.size(), h);
}

}  // namespace pamtree
