#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

namespace freqfleet {

// splitmix64 finalizer; cheap stateless seed derivation for independent
// substreams.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t s = mix_seed(master ^ mix_seed(tag));
    s = mix_seed(s ^ mix_seed(a + 0x100000001ULL));
    s = mix_seed(s ^ mix_seed(b + 0x200000002ULL));
    return s;
}

// Shortest round-trippable decimal form; locale-independent.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace freqfleet
