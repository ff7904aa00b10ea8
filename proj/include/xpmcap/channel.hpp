// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "xpmcap/coeffs.hpp"
#include "xpmcap/config.hpp"
#include "xpmcap/rng.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace xpmcap {

struct PeakPowerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// K users x n symbols. Users and time indices are 0-based in memory.
struct SymbolFrame {
    std::vector<cvec> symbols;
    std::vector<double> peak_power;  // W

    int num_users() const { return static_cast<int>(symbols.size()); }
    std::size_t length() const { return symbols.empty() ? 0 : symbols.front().size(); }
    // 0 outside [0, n).
    cd at(int k, long i) const;
    // Throws PeakPowerError on |x|^2 > P (relative slack 1e-12).
    void check_peak() const;
};

// sigma_sq[k] is per real dimension: E|N|^2 = 2 sigma_sq. Zero means noiseless.
struct NoiseModel {
    std::vector<double> sigma_sq;
    std::uint64_t seed = 0;

    static NoiseModel none(int users) { return {std::vector<double>(users, 0.0), 0}; }
};

// Amplifier noise, per real dimension, in the symbol-rate bandwidth, unless
// the config overrides it with noise_variance_w.
double ase_variance(const SystemConfig& cfg);
double ase_variance_formula(const SystemConfig& cfg);

// Frame with every user drawn i.i.d. from its law.
SymbolFrame random_frame(const std::vector<InputLaw>& laws, const std::vector<double>& peak_power, std::size_t n,
                         std::uint64_t seed);

// Two-pulse-collision model:
// Y_k[i] = X_k[i] (1 + j sum_w sum_m c[k][w][m] |X_w[i-m]|^2) + N_k[i].
SymbolFrame simulate_simplified(const SymbolFrame& frame, const CoefficientTable& table, const NoiseModel& noise);

// Per-symbol XPM phase sum_w sum_m c |X_w[i-m]|^2 for user k (the bracket above).
std::vector<double> xpm_phase(const SymbolFrame& frame, const CoefficientTable& table, int k);

// Full collision set S^{p,l,m} for |p|,|l|,|m| <= truncation, per spacing.
struct FirstOrderTable {
    int num_users = 0;
    int truncation = 0;
    double gamma = 0.0;
    std::vector<std::vector<cd>> S;  // [spacing-1][index(p,l,m)], km

    int width() const { return 2 * truncation + 1; }
    std::size_t index(int p, int l, int m) const;
    cd at(int spacing, int p, int l, int m) const { return S.at(spacing - 1).at(index(p, l, m)); }
};

FirstOrderTable compute_first_order_table(const SystemConfig& cfg, int truncation);

// Eq. 2 truncated: X_k + N + j gamma sum_w sum_{p,l,m} X_k[i-p] S X_w[i-l] X_w*[i-m].
SymbolFrame simulate_first_order(const SymbolFrame& frame, const FirstOrderTable& table, const NoiseModel& noise);

// Binary: "XPMF", u32 version=1, u32 K, u64 n, K x f64 peak powers, then
// per user n x (re, im) f64. Little-endian.
std::string encode_frame(const SymbolFrame& frame);
SymbolFrame decode_frame(const std::string& bytes);
// CSV: user,index,re,im,peak_power_w (user and index 1-based).
std::string frame_csv(const SymbolFrame& frame);
SymbolFrame parse_frame_csv(const std::string& text);

}  // namespace xpmcap
