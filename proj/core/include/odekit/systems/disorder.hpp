#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

#include "odekit/state.hpp"

namespace odekit {

/// Identifies the sample stream below. Bump the version if the mapping from
/// seed to values ever changes.
inline constexpr std::string_view uniform_stream_id = "mt19937_64/u53-v1";

/// Uniform doubles in [lo, hi] that are identical on every platform:
/// std::mt19937_64 is fully specified by the standard, and the top 53 bits of
/// each draw are mapped to [0, 1) by hand instead of through
/// std::uniform_real_distribution, whose algorithm is implementation-defined.
class uniform_stream {
public:
    explicit uniform_stream(std::uint64_t seed) : m_engine(seed) {}

    scalar unit() { return static_cast<scalar>(m_engine() >> 11) * 0x1.0p-53; }
    scalar next(scalar lo, scalar hi) { return lo + (hi - lo) * unit(); }

private:
    std::mt19937_64 m_engine;
};

/// n samples of uniform_stream(seed) in [lo, hi].
state_vector uniform_field(std::uint64_t seed, std::size_t n, scalar lo, scalar hi);

/// Per-node squared frequencies omega^2 of the disordered lattice, row-major
/// over an nx-by-ny grid. Requires lo <= hi.
state_vector make_disorder(std::uint64_t seed, std::size_t nx, std::size_t ny, scalar lo, scalar hi);

}  // namespace odekit
