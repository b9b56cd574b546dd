#pragma once

#include <cstdint>
#include <random>

#include "cnls/phase_space.hpp"

namespace cnls {

/// Deterministic generator shared by all sampling code.
using Rng = std::mt19937_64;

/// Uniform double in [lo, hi) from the top 53 bits.
inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * (double(rng() >> 11) * 0x1.0p-53);
}

/// Random state with coefficients decaying like 1/(1+j²), rescaled to the given ‖·‖_s.
inline FourierState random_state(Rng& rng, int J, double target_norm, double s = 1.0) {
    FourierState z(J);
    for (int j = -J; j <= J; ++j) {
        const double w = 1.0 / (1.0 + double(j) * j);
        z.a()[j] = {w * uniform(rng, -1, 1), w * uniform(rng, -1, 1)};
        z.b()[j] = {w * uniform(rng, -1, 1), w * uniform(rng, -1, 1)};
    }
    const double n = norm_s(z, s);
    if (n > 0) z *= cplx(target_norm / n, 0);
    return z;
}

}  // namespace cnls
