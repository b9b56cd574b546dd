#pragma once

#include <cmath>
#include <random>

#include "cnls/random.hpp"

namespace cnls::test {

using cnls::uniform;
using cnls::random_state;

/// Least-squares slope of log(y) against log(x).
template <class Xs, class Ys>
double loglog_slope(const Xs& x, const Ys& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace cnls::test
