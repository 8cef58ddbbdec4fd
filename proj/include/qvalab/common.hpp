/**
 * @file common.hpp
 * @brief Shared error types, window-bound sentinels and saturating bound arithmetic.
 *
 * Window bounds for truncated Laurent-series slices live in a saturating integer
 * arithmetic: WINF acts as +infinity and -WINF as -infinity.  All bound
 * computations in the series layer must go through wadd/wneg so that unknown
 * ("infinite") bounds propagate instead of silently wrapping.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <cstdint>

namespace qvalab {

/// Raised for invalid user-supplied configuration (bad CLI flags, bad JSON, ...).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised for violated internal invariants (these indicate bugs, not bad input).
struct internal_error : std::logic_error {
    explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

/// Sentinel used as +infinity for window bounds; -WINF is -infinity.
/// Chosen far below INT_MAX/2 so sums of a few sentinels cannot overflow int64.
inline constexpr long WINF = 1L << 28;

/// True if b is saturated at either infinity.
inline bool winf(long b) { return b >= WINF || b <= -WINF; }

/// Saturating addition of window bounds.
inline long wadd(long a, long b) {
    if (a >= WINF || b >= WINF) {
        if (a <= -WINF || b <= -WINF)
            throw internal_error("wadd: adding opposite infinities");
        return WINF;
    }
    if (a <= -WINF || b <= -WINF) return -WINF;
    long s = a + b;
    if (s >= WINF) return WINF;
    if (s <= -WINF) return -WINF;
    return s;
}

/// Saturating negation of a window bound.
inline long wneg(long a) {
    if (a >= WINF) return -WINF;
    if (a <= -WINF) return WINF;
    return -a;
}

/// Clamp a bound into the saturating range (used after ad-hoc arithmetic).
inline long wclamp(long a) {
    if (a >= WINF) return WINF;
    if (a <= -WINF) return -WINF;
    return a;
}

} // namespace qvalab
