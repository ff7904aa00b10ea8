// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace xpmcap {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Split-step and receiver settings. Only the ssfm module reads these.
struct SsfmSettings {
    double step_km = 0.01;
    int samples_per_symbol = 16;
    int symbols = 16384;
    double dbp_step_km = 0.1;
    int dbp_samples_per_symbol = 4;
};

// Link and numerics. Physical quantities are stored in the units the
// member name says; the file format uses the same names.
struct SystemConfig {
    int num_users = 3;
    double span_length_km = 250.0;
    double gamma_per_w_km = 1.2;
    double symbol_rate_gbaud = 32.0;
    double alpha_db_per_km = 0.2;
    double beta2_ps2_per_km = -21.7;
    double rolloff = 0.1;
    double channel_spacing_ghz = 100.0;
    double noise_figure_db = 3.0;
    double carrier_frequency_thz = 193.414;
    int memory = 11;
    int samples_per_symbol = 16;
    int time_window_symbols = 4096;
    int z_steps = 1000;
    // Replaces the amplifier-noise formula when set.
    std::optional<double> noise_variance_w;
    SsfmSettings ssfm;

    double symbol_rate() const { return symbol_rate_gbaud * 1e9; }
    double symbol_period() const { return 1.0 / symbol_rate(); }
    double beta2() const { return beta2_ps2_per_km * 1e-24; }  // s^2/km
    double alpha() const;                                     // 1/km, power
    double spacing_rad_s() const;
    double span_gain() const;  // linear amplifier gain that undoes span loss

    // Throws ConfigError on any violated invariant.
    void validate() const;

    static SystemConfig table1() { return {}; }
};

// Flat "key = value" text. Unknown keys are an error; '#' starts a comment.
SystemConfig parse_config(const std::string& text);
SystemConfig load_config(const std::string& path);

// Applies XPMCAP_CFG_<KEY> environment overrides (key uppercased).
void apply_env_overrides(SystemConfig& cfg);

std::map<std::string, std::string> config_entries(const SystemConfig& cfg);
std::string serialize_config(const SystemConfig& cfg);

}  // namespace xpmcap
