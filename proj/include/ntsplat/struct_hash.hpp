#pragma once

#include <cstdint>

namespace nts {

// FNV-1a accumulator over the discrete decisions of a forward pass (clamp
// states, sort orders, interpolation cells, skip sets). Two evaluations with
// the same hash took the same piecewise-smooth branch everywhere, so central
// differences across them are valid.
struct StructHash {
    std::uint64_t value = 1469598103934665603ULL;

    void add(std::uint64_t v) {
        value ^= v;
        value *= 1099511628211ULL;
    }
    void add_int(std::int64_t v) { add(static_cast<std::uint64_t>(v)); }
    void add_bool(bool b) { add(b ? 0x9e3779b9ULL : 0x85ebca6bULL); }
};

}  // namespace nts
