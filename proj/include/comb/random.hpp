#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace comb {

// Single explicit generator threaded through every sampler; all draws go
// through inverse transforms on open-(0,1) uniforms so a seed pins the
// output bit for bit.
using Rng = std::mt19937_64;

inline double uniform_open01(Rng& rng) { return ((rng() >> 11) + 0.5) * 0x1.0p-53; }

inline double exponential_draw(Rng& rng, double rate) {
    return -std::log(uniform_open01(rng)) / rate;
}

} // namespace comb
