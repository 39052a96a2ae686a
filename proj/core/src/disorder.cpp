#include "odekit/systems/disorder.hpp"

#include <stdexcept>

namespace odekit {

state_vector uniform_field(std::uint64_t seed, std::size_t n, scalar lo, scalar hi) {
    if (!(lo <= hi)) throw std::invalid_argument("uniform_field: need lo <= hi");
    uniform_stream rng(seed);
    state_vector out(n);
    for (auto& v : out) v = rng.next(lo, hi);
    return out;
}

state_vector make_disorder(std::uint64_t seed, std::size_t nx, std::size_t ny, scalar lo, scalar hi) {
    return uniform_field(seed, nx * ny, lo, hi);
}

}  // namespace odekit
