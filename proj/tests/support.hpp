// Shared fixtures for the unit suites: small grids that run in well under
// a second but keep the Table I physics (fiber, rates, spacing).
#pragma once

#include "xpmcap/config.hpp"
#include "xpmcap/fft.hpp"

#include <random>

namespace xpmcap::testing {

inline SystemConfig small_link() {
    SystemConfig c = SystemConfig::table1();
    c.span_length_km = 50.0;
    c.memory = 3;
    c.samples_per_symbol = 8;
    c.time_window_symbols = 512;
    c.z_steps = 200;
    return c;
}

inline cvec random_cvec(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, scale);
    cvec v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

inline double rel_diff(cd a, cd b) {
    const double s = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / s;
}

}  // namespace xpmcap::testing
