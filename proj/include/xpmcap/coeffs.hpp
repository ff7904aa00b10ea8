// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "xpmcap/config.hpp"
#include "xpmcap/fft.hpp"

#include <span>
#include <string>
#include <vector>

namespace xpmcap {

struct LagTriple {
    int p = 0, l = 0, m = 0;
};

// Collision integral S_{k,w}^{p,l,m} for a pair of users whose channel
// indices differ by `spacing` (>= 1). Units: km. The pulse is unit-energy
// and the time integral is scaled by the symbol period, so gamma*S is a
// gain per watt. Shares the per-z pulse evaluations across all triples.
std::vector<cd> collision_integrals(int spacing, std::span<const LagTriple> lags, const SystemConfig& cfg);

// Single entry; users are 0-based and must differ.
cd compute_S(int k, int w, int p, int l, int m, const SystemConfig& cfg);

// c[k][w][m] = gamma * Re S_{k,w}^{0,m,m}. Entries depend on |k-w| only and
// are stored once per spacing.
class CoefficientTable {
public:
    CoefficientTable() = default;
    CoefficientTable(int num_users, int memory);

    int num_users() const { return num_users_; }
    int memory() const { return memory_; }
    int lags() const { return 2 * memory_ + 1; }

    // 0-based users; 0 when k == w.
    double c(int k, int w, int m) const;
    cd raw(int k, int w, int m) const;  // raw S in km (before gamma and clamping)
    // 2M+1 taps for lags -M..M, or nullptr when k == w.
    const double* taps(int k, int w) const;

    // Per-spacing storage, spacing in 1..K-1.
    std::vector<double>& coef_for_spacing(int spacing) { return coef_.at(spacing - 1); }
    std::vector<cd>& raw_for_spacing(int spacing) { return raw_.at(spacing - 1); }
    const std::vector<double>& coef_for_spacing(int spacing) const { return coef_.at(spacing - 1); }

    // Multiply every c by s (the raw values are untouched).
    CoefficientTable scaled(double s) const;

private:
    void check(int k, int w, int m) const;
    int num_users_ = 0;
    int memory_ = 0;
    std::vector<std::vector<double>> coef_;
    std::vector<std::vector<cd>> raw_;
};

CoefficientTable compute_coefficient_table(const SystemConfig& cfg);

// CSV columns k,w,m,c_real,S_raw_re,S_raw_im; users 1-based; every ordered pair.
std::string coefficient_csv(const CoefficientTable& table);
CoefficientTable parse_coefficient_csv(const std::string& text);

// Diagnostics for the structural claims about the table (not enforced).
struct TableStructure {
    double max_lag_asymmetry = 0.0;  // max |c[m]-c[-m]| / c[0] over spacings
    double max_tail_ratio = 0.0;     // max c[m]/c[0] for |m| > 10, spacing 1
    bool spacing_monotone = true;    // spacing 1 >= spacing 2 for every m
};
TableStructure table_structure(const CoefficientTable& table);

}  // namespace xpmcap
