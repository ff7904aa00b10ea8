// SPDX-License-Identifier: Apache-2.0
#include "xpmcap/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

namespace xpmcap {

double SystemConfig::alpha() const { return alpha_db_per_km * std::log(10.0) / 10.0; }

double SystemConfig::spacing_rad_s() const { return 2.0 * std::numbers::pi * channel_spacing_ghz * 1e9; }

double SystemConfig::span_gain() const { return std::pow(10.0, alpha_db_per_km * span_length_km / 10.0); }

namespace {

bool is_pow2(long v) { return v > 0 && (v & (v - 1)) == 0; }

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid config: " + what);
}

}  // namespace

void SystemConfig::validate() const {
    require(num_users >= 2, "num_users must be >= 2");
    require(std::isfinite(span_length_km) && span_length_km > 0.0, "span_length_km must be > 0");
    require(std::isfinite(gamma_per_w_km) && gamma_per_w_km >= 0.0, "gamma_per_w_km must be >= 0");
    require(symbol_rate_gbaud > 0.0, "symbol_rate_gbaud must be > 0");
    require(alpha_db_per_km >= 0.0, "alpha_db_per_km must be >= 0");
    require(std::isfinite(beta2_ps2_per_km), "beta2_ps2_per_km must be finite");
    require(rolloff >= 0.0 && rolloff <= 1.0, "rolloff must be in [0,1]");
    require(channel_spacing_ghz > 0.0, "channel_spacing_ghz must be > 0");
    require(channel_spacing_ghz >= symbol_rate_gbaud * (1.0 + rolloff),
            "channels overlap: channel_spacing_ghz < (1+rolloff)*symbol_rate_gbaud");
    require(memory >= 0, "memory must be >= 0");
    require(samples_per_symbol >= 2 && is_pow2(samples_per_symbol), "samples_per_symbol must be a power of two >= 2");
    require(time_window_symbols > 2 * memory + 2, "time_window_symbols too small for memory");
    require(z_steps >= 2, "z_steps must be >= 2");
    require(!noise_variance_w || (*noise_variance_w >= 0.0 && std::isfinite(*noise_variance_w)),
            "noise_variance_w must be >= 0");

    // Dispersive spread plus walk-off of the farthest interferer must fit in
    // half the window; the energy test in waveform checks the pulse itself.
    const double T = symbol_period();
    const double bw = 2.0 * std::numbers::pi * (1.0 + rolloff) * symbol_rate() / 2.0;
    const double spread = std::abs(beta2()) * span_length_km * bw / T;
    const double walk = std::abs(beta2()) * spacing_rad_s() * (num_users - 1) * span_length_km / T;
    require(spread + walk + memory + 8.0 < 0.5 * time_window_symbols,
            "time_window_symbols too small for dispersion and walk-off over the span");

    require(ssfm.step_km > 0.0 && ssfm.dbp_step_km > 0.0, "ssfm step sizes must be > 0");
    require(ssfm.samples_per_symbol >= 2 && is_pow2(ssfm.samples_per_symbol), "ssfm_samples_per_symbol must be a power of two >= 2");
    require(ssfm.dbp_samples_per_symbol >= 2 && is_pow2(ssfm.dbp_samples_per_symbol) &&
                ssfm.dbp_samples_per_symbol <= ssfm.samples_per_symbol,
            "dbp_samples_per_symbol must be a power of two in [2, ssfm_samples_per_symbol]");
    require(ssfm.symbols >= 16 && is_pow2(ssfm.symbols), "ssfm_symbols must be a power of two >= 16");
}

namespace {

struct Field {
    std::function<void(SystemConfig&, const std::string&)> set;
    std::function<std::string(const SystemConfig&)> get;
};

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("config key '" + key + "': trailing characters in '" + v + "'");
    return out;
}

int to_int(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
    return static_cast<int>(d);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        auto dbl = [&t](const std::string& name, double SystemConfig::*member) {
            t[name] = {[member, name](SystemConfig& c, const std::string& v) { c.*member = to_double(name, v); },
                       [member](const SystemConfig& c) { return fmt(c.*member); }};
        };
        auto integer = [&t](const std::string& name, int SystemConfig::*member) {
            t[name] = {[member, name](SystemConfig& c, const std::string& v) { c.*member = to_int(name, v); },
                       [member](const SystemConfig& c) { return std::to_string(c.*member); }};
        };
        integer("num_users", &SystemConfig::num_users);
        dbl("span_length_km", &SystemConfig::span_length_km);
        dbl("gamma_per_w_km", &SystemConfig::gamma_per_w_km);
        dbl("symbol_rate_gbaud", &SystemConfig::symbol_rate_gbaud);
        dbl("alpha_db_per_km", &SystemConfig::alpha_db_per_km);
        dbl("beta2_ps2_per_km", &SystemConfig::beta2_ps2_per_km);
        dbl("rolloff", &SystemConfig::rolloff);
        dbl("channel_spacing_ghz", &SystemConfig::channel_spacing_ghz);
        dbl("noise_figure_db", &SystemConfig::noise_figure_db);
        dbl("carrier_frequency_thz", &SystemConfig::carrier_frequency_thz);
        integer("memory", &SystemConfig::memory);
        integer("samples_per_symbol", &SystemConfig::samples_per_symbol);
        integer("time_window_symbols", &SystemConfig::time_window_symbols);
        integer("z_steps", &SystemConfig::z_steps);
        t["noise_variance_w"] = {
            [](SystemConfig& c, const std::string& v) {
                if (v == "auto" || v.empty()) c.noise_variance_w.reset();
                else c.noise_variance_w = to_double("noise_variance_w", v);
            },
            [](const SystemConfig& c) { return c.noise_variance_w ? fmt(*c.noise_variance_w) : std::string("auto"); }};
        t["ssfm_step_km"] = {[](SystemConfig& c, const std::string& v) { c.ssfm.step_km = to_double("ssfm_step_km", v); },
                             [](const SystemConfig& c) { return fmt(c.ssfm.step_km); }};
        t["ssfm_samples_per_symbol"] = {
            [](SystemConfig& c, const std::string& v) { c.ssfm.samples_per_symbol = to_int("ssfm_samples_per_symbol", v); },
            [](const SystemConfig& c) { return std::to_string(c.ssfm.samples_per_symbol); }};
        t["ssfm_symbols"] = {[](SystemConfig& c, const std::string& v) { c.ssfm.symbols = to_int("ssfm_symbols", v); },
                             [](const SystemConfig& c) { return std::to_string(c.ssfm.symbols); }};
        t["dbp_step_km"] = {[](SystemConfig& c, const std::string& v) { c.ssfm.dbp_step_km = to_double("dbp_step_km", v); },
                            [](const SystemConfig& c) { return fmt(c.ssfm.dbp_step_km); }};
        t["dbp_samples_per_symbol"] = {
            [](SystemConfig& c, const std::string& v) { c.ssfm.dbp_samples_per_symbol = to_int("dbp_samples_per_symbol", v); },
            [](const SystemConfig& c) { return std::to_string(c.ssfm.dbp_samples_per_symbol); }};
        return t;
    }();
    return table;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

SystemConfig parse_config(const std::string& text) {
    SystemConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = fields().find(key);
        if (it == fields().end()) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second.set(cfg, value);
    }
    return cfg;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_env_overrides(SystemConfig& cfg) {
    for (const auto& [key, field] : fields()) {
        std::string env = "XPMCAP_CFG_";
        for (char ch : key) env += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (const char* v = std::getenv(env.c_str())) field.set(cfg, trim(v));
    }
}

std::map<std::string, std::string> config_entries(const SystemConfig& cfg) {
    std::map<std::string, std::string> out;
    for (const auto& [key, field] : fields()) out[key] = field.get(cfg);
    return out;
}

std::string serialize_config(const SystemConfig& cfg) {
    std::string out;
    for (const auto& [key, value] : config_entries(cfg)) out += key + " = " + value + "\n";
    return out;
}

}  // namespace xpmcap
