#pragma once

#include <cstdint>

// Elementary-operation counter. Hot loops call tick(); benchmarks read the
// difference between two snapshots. Counting is per thread.
namespace dyndb::ops {

inline thread_local std::uint64_t counter = 0;

inline void tick(std::uint64_t n = 1) { counter += n; }
inline std::uint64_t now() { return counter; }

struct Span {
    std::uint64_t start = now();
    std::uint64_t elapsed() const { return now() - start; }
};

}  // namespace dyndb::ops
