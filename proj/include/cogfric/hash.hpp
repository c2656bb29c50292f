#pragma once

#include <cstdint>
#include <string_view>

namespace cogfric {

// FNV-1a, 64 bit: offset basis 0xcbf29ce484222325, prime 0x100000001b3.
// The seed is XORed into the offset basis, so seed 0 is plain FNV-1a.
// Same bytes and seed give the same value on every platform and run.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace cogfric
