// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "xpmcap/channel.hpp"
#include "xpmcap/config.hpp"
#include "xpmcap/mi.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace xpmcap {

// Optical field over one periodic window of `symbols` symbol periods.
struct FieldGrid {
    cvec samples;
    double dt = 0.0;
    std::vector<double> offsets_hz;  // channel centre frequencies
    int symbols = 0;
    int samples_per_symbol = 0;

    double symbol_rate() const { return 1.0 / (dt * samples_per_symbol); }
    double energy() const;  // sum |A|^2 dt, J
};

struct SsfmPlan {
    double step_km = 0.01;
    double length_km = 0.0;
    double alpha_per_km = 0.0;
    double beta2 = 0.0;  // s^2/km
    double gamma = 0.0;  // 1/(W km)
    bool amplify = true;       // lumped gain exp(alpha L) at the end
    double ase_sigma_sq = 0.0; // per real dimension in the symbol-rate band; 0 disables

    static SsfmPlan from_config(const SystemConfig& cfg);
    int steps() const;  // throws on step/length mismatch
};

// Channel k sits at (k - (K-1)/2) * spacing. Grid rate is
// ssfm.samples_per_symbol * Rs; the frame length must put every channel
// centre on a DFT bin.
FieldGrid wdm_mux(const SymbolFrame& frame, const SystemConfig& cfg);

// Symmetric split step: half linear, Kerr rotation exp(-j gamma |A|^2 h),
// half linear; adjacent half steps are merged. Then gain and ASE.
FieldGrid ssfm_propagate(FieldGrid field, const SsfmPlan& plan, std::uint64_t seed);

// Demux to baseband with a (1+rolloff)Rs brick-wall, decimate, single-
// channel DBP at the channel's own frequency, RRC matched filter, sample.
cvec receiver_chain(const FieldGrid& field, int k, const SystemConfig& cfg);
// Same without DBP (linear receiver), used by diagnostics.
cvec receiver_chain_no_dbp(const FieldGrid& field, int k, const SystemConfig& cfg);

// |h|^2 E|x|^2 / E|y - h x|^2 with h fitted by least squares.
double effective_snr(const cvec& x, const cvec& y);

enum class Scenario { tin, lower_bound };
std::string scenario_name(Scenario s);
Scenario parse_scenario(const std::string& name);  // "tin" | "lower-bound"

struct Fig8Row {
    double power_dbm = 0.0;
    int user = 0;  // 0-based
    Scenario scenario = Scenario::tin;
    double mi_bits = 0.0;
    double standard_error = 0.0;
    MiEstimator estimator = MiEstimator::gaussian_auxiliary;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    double snr_db = 0.0;
};

// Seed used for one power point; depends only on (seed, scenario, power).
std::uint64_t point_seed(std::uint64_t seed, Scenario s, double power_dbm);

// One power point of the Table II scenarios for the middle user:
// tin = every user on the disk law; lower-bound = PSK interferers.
Fig8Row fig8_point(const SystemConfig& cfg, double power_dbm, Scenario scenario, std::uint64_t seed, int psk_order = 16);

std::vector<Fig8Row> fig8_experiment(const SystemConfig& cfg, const std::vector<double>& power_dbm, Scenario scenario,
                                     const std::vector<std::uint64_t>& seeds, int psk_order = 16);

// power_dBm,user,scenario,mi_bits,estimator,seed,n (user 1-based)
std::string fig8_csv_header();
std::string fig8_csv_row(const Fig8Row& row);

}  // namespace xpmcap
