// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace xpmcap {

inline double dbm_to_w(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double w_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

// "start:stop:step" in dBm, inclusive of stop when it lands on the grid
// (within 1e-9 of a step). A single number is a one-point grid.
std::vector<double> parse_power_grid(const std::string& spec);

}  // namespace xpmcap
