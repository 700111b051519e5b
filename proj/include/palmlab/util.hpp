#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace palmlab {

// Raised when caller-supplied data violates a documented precondition.
// The CLI maps this to exit code 2.
struct InvalidInput : std::runtime_error {
    explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an internal consistency check fails. Indicates a bug,
// never bad user input. The CLI maps this to exit code 4.
struct InternalDefect : std::runtime_error {
    explicit InternalDefect(const std::string& what) : std::runtime_error(what) {}
};

// splitmix64: tiny, well-mixed 64-bit stream generator. Used to derive
// independent per-replicate seeds from (seed, stream, counter) so results
// do not depend on scheduling or iteration order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return splitmix64(splitmix64(seed ^ (0xabcdef1234567891ULL * (stream + 1))) + counter);
}

}  // namespace palmlab
