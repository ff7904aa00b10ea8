// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "xpmcap/coeffs.hpp"
#include "xpmcap/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace xpmcap {

// Users are 0-based; powers are peak powers in W, one per user.

// sum_{w != k} P_w sum_m c[k][w][m]: the largest value the weighted
// interference sum can take under the peak constraints.
double aggregate_gain(int k, const std::vector<double>& powers, const CoefficientTable& table);

// sum_{w != k} sum_m c[k][w][m] |x_w[i-m]|^2 for one window of interferer
// powers: power_by_lag[w][m + M] = |x_w[i-m]|^2.
double interference_sum(int k, const std::vector<std::vector<double>>& power_by_lag, const CoefficientTable& table);

// sigma_sq is per real dimension.
double outer_bound(int k, const std::vector<double>& powers, const CoefficientTable& table, double sigma_sq);
double inner_bound(int k, const std::vector<double>& powers, const CoefficientTable& table, double sigma_sq);
// Both variances per real dimension.
double tin_bound(double peak_power, double sigma_sq, double sigma_nli_sq);
// log2(1 + P/(2 sigma^2)): the outer bound with the gain forced to zero.
double awgn_reference(double peak_power, double sigma_sq);

struct NliEstimate {
    double variance = 0.0;        // E|NLI|^2, both real dimensions, W
    double standard_error = 0.0;
    double closed_form = 0.0;     // from the moments of the input law
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::string law;
};

// Monte-Carlo second moment of j X_k sum_w sum_m c |X_w[i-m]|^2, all
// inputs i.i.d. under `law`. Mean is zero for every supported law.
NliEstimate nli_variance(int k, const std::vector<double>& powers, const CoefficientTable& table, const InputLaw& law,
                         std::size_t mc_samples, std::uint64_t seed);

struct RateEstimate {
    double bits = 0.0;
    double standard_error = 0.0;
};

// Rate of non-focus user `user` sending uniform PSK while user `focus`
// uses the disk law and every other user sends PSK, through the simplified
// model with noise sigma_sq; gaussian-auxiliary estimate.
RateEstimate psk_interferer_rate(int user, int focus, const std::vector<double>& powers, const CoefficientTable& table,
                                 double sigma_sq, int psk_order, std::size_t mc_samples, std::uint64_t seed);

struct NliSettings {
    std::string law = "disk";
    std::size_t samples = 1000000;
    std::uint64_t seed = 1;
    double reference_power_w = 1e-3;
};

// Equal launch power for every user at each grid point.
struct BoundCurve {
    int user = 0;
    std::vector<double> power_dbm, tin, inner, outer, awgn, sigma_nli_sq;  // sigma_nli_sq per real dimension
    double sigma_sq = 0.0;
    std::string config_hash;
    NliSettings nli;
    NliEstimate nli_reference;
};

BoundCurve bound_curve(int k, const std::vector<double>& power_dbm, const CoefficientTable& table, double sigma_sq,
                       const NliSettings& nli = {});

// power_dBm,tin,inner,outer,sigma_nli,awgn_reference
std::string bound_curve_csv(const BoundCurve& curve);
std::string bound_curve_json(const BoundCurve& curve, const std::string& extra_provenance_json = "{}");

}  // namespace xpmcap
