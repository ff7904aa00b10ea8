// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "xpmcap/rng.hpp"

#include <string>

namespace xpmcap {

enum class MiEstimator { gaussian_auxiliary, histogram };

std::string estimator_name(MiEstimator e);
MiEstimator parse_estimator(const std::string& name);

struct MiEstimate {
    double bits = 0.0;
    double standard_error = 0.0;
    MiEstimator estimator = MiEstimator::gaussian_auxiliary;
    std::size_t n = 0;
    cd gain{};                 // fitted h (gaussian-auxiliary)
    double residual_var = 0.0; // fitted E|y - h x|^2
};

struct MiParams {
    int bins = 64;  // histogram: output-plane bins per axis
    // gaussian-auxiliary: residual variance floor relative to |h|^2 E|x|^2.
    double residual_floor = 1e-12;
};

// Per-symbol MI between x and y, where x was drawn from `law` under peak
// power `peak_power`. The gaussian-auxiliary estimate fits y = h x + z with
// circular Gaussian z and evaluates E[log q(y|x)/q(y)], q(y) being the law
// pushed through the fitted channel: a lower bound on I(X;Y).
MiEstimate estimate_mi(const cvec& x, const cvec& y, MiEstimator estimator, const InputLaw& law, double peak_power,
                       const MiParams& params = {});

namespace oracle {
// BPSK (+-sqrt(P)) over complex AWGN with variance sigma_sq per real dimension.
double bpsk_awgn_mi(double peak_power, double sigma_sq);
// Constant amplitude, uniform phase, same channel; radial quadrature of h(Y).
double ring_awgn_mi(double peak_power, double sigma_sq);
}  // namespace oracle

// log I0(x) for x >= 0 without overflow.
double log_bessel_i0(double x);

}  // namespace xpmcap
