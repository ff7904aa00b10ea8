// SPDX-License-Identifier: Apache-2.0
// Command-line front end: coeffs, bounds, region, ssfm.
//
// Precedence for every setting: command-line flag > environment > config
// file > built-in Table I defaults. Flag environment names are listed in
// --help; config keys are overridden by XPMCAP_CFG_<KEY>.
#include "xpmcap/bounds.hpp"
#include "xpmcap/channel.hpp"
#include "xpmcap/coeffs.hpp"
#include "xpmcap/config.hpp"
#include "xpmcap/hash.hpp"
#include "xpmcap/regions.hpp"
#include "xpmcap/simd.hpp"
#include "xpmcap/ssfm.hpp"
#include "xpmcap/units.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <unistd.h>

namespace fs = std::filesystem;
using namespace xpmcap;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
    std::string config_path;
    std::string out = "out";
    std::string powers;
    std::uint64_t seed = 1;
    std::string scenario;
    int psk_order = 16;
    std::size_t mc_samples = 0;
    long max_points = -1;
};

// Exit codes: 0 ok, 1 runtime failure, 2 usage, 3 partial (checkpoint kept).
struct Partial : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
    const fs::path tmp = p.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, p);
}

SystemConfig load(const Options& o) {
    SystemConfig cfg = o.config_path.empty() ? SystemConfig::table1() : load_config(o.config_path);
    apply_env_overrides(cfg);
    cfg.validate();
    return cfg;
}

std::string config_hash(const SystemConfig& cfg) { return hex64(fnv1a(serialize_config(cfg))); }

// Only what enters the collision integrals and gamma.
std::string coefficient_key(const SystemConfig& cfg) {
    std::ostringstream os;
    os << std::setprecision(17) << "v1|" << cfg.num_users << '|' << cfg.span_length_km << '|' << cfg.gamma_per_w_km << '|'
       << cfg.symbol_rate_gbaud << '|' << cfg.alpha_db_per_km << '|' << cfg.beta2_ps2_per_km << '|' << cfg.rolloff << '|'
       << cfg.channel_spacing_ghz << '|' << cfg.memory << '|' << cfg.samples_per_symbol << '|' << cfg.time_window_symbols
       << '|' << cfg.z_steps << '|' << simd::active().name;
    return hex64(fnv1a(os.str()));
}

fs::path cache_dir(const Options& o) {
    if (const char* env = std::getenv("XPMCAP_CACHE_DIR")) return env;
    return fs::path(o.out) / ".cache";
}

struct CachedTable {
    CoefficientTable table;
    bool hit = false;
    fs::path path;
};

CachedTable coefficient_table(const SystemConfig& cfg, const Options& o) {
    CachedTable out;
    out.path = cache_dir(o) / ("coeffs-" + coefficient_key(cfg) + ".csv");
    if (fs::exists(out.path)) {
        out.table = parse_coefficient_csv(read_file(out.path));
        out.hit = true;
        return out;
    }
    out.table = compute_coefficient_table(cfg);
    write_atomic(out.path, coefficient_csv(out.table));
    return out;
}

class Manifest {
public:
    Manifest(std::string command, const SystemConfig& cfg, const Options& o, json args)
        : start_(std::chrono::steady_clock::now()), out_(o.out) {
        j_["command"] = std::move(command);
        j_["config_hash"] = config_hash(cfg);
        j_["args"] = std::move(args);
        j_["id"] = hex64(fnv1a(j_.dump()));
        j_["module_version"] = kVersion;
        j_["simd"] = simd::active().name;
        j_["noise_variance_w_per_dim"] = ase_variance(cfg);
        j_["noise_source"] = cfg.noise_variance_w ? "config override" : "amplifier formula, carrier " +
                                                                         std::to_string(cfg.carrier_frequency_thz) + " THz (assumed)";
        j_["config"] = config_entries(cfg);
        j_["outputs"] = json::array();
    }
    std::string id() const { return j_["id"]; }
    void output(const fs::path& p) { j_["outputs"].push_back(p.string()); }
    void set(const std::string& k, json v) { j_[k] = std::move(v); }
    void commit() {
        j_["timing_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        fs::create_directories(out_);
        // Append-only log; one line per run.
        std::ofstream log(fs::path(out_) / "manifests.jsonl", std::ios::app);
        log << j_.dump() << '\n';
        if (!log) throw std::runtime_error("cannot append manifest");
    }

private:
    std::chrono::steady_clock::time_point start_;
    std::string out_;
    json j_;
};

int cmd_coeffs(const Options& o) {
    const SystemConfig cfg = load(o);
    Manifest man("coeffs", cfg, o, json::object());
    const CachedTable t = coefficient_table(cfg, o);
    const fs::path path = fs::path(o.out) / "coefficients.csv";
    write_atomic(path, coefficient_csv(t.table));
    man.output(path);
    man.set("cache", {{"hit", t.hit}, {"path", t.path.string()}});
    const TableStructure st = table_structure(t.table);
    man.set("structure", {{"max_lag_asymmetry", st.max_lag_asymmetry},
                          {"max_tail_ratio_beyond_10", st.max_tail_ratio},
                          {"spacing_monotone", st.spacing_monotone}});
    man.commit();
    std::cout << "coefficients: " << path.string() << (t.hit ? " (cache hit)" : "") << "\n";
    return 0;
}

int cmd_bounds(const Options& o) {
    const SystemConfig cfg = load(o);
    const std::vector<double> grid = parse_power_grid(o.powers.empty() ? "-15:5:0.5" : o.powers);
    NliSettings nli;
    nli.seed = o.seed;
    if (o.mc_samples) nli.samples = o.mc_samples;
    Manifest man("bounds", cfg, o, {{"powers", grid}, {"seed", o.seed}, {"nli_samples", nli.samples}});
    const CachedTable t = coefficient_table(cfg, o);
    const double s2 = ase_variance(cfg);
    for (int k = 0; k < cfg.num_users; ++k) {
        BoundCurve curve = bound_curve(k, grid, t.table, s2, nli);
        curve.config_hash = config_hash(cfg);
        const std::string stem = "bounds_user" + std::to_string(k + 1);
        const fs::path csv = fs::path(o.out) / (stem + ".csv");
        const fs::path js = fs::path(o.out) / (stem + ".json");
        write_atomic(csv, bound_curve_csv(curve));
        write_atomic(js, bound_curve_json(curve, json{{"manifest", man.id()}, {"sigma_sq_source", cfg.noise_variance_w ? "override" : "formula"}}.dump()));
        man.output(csv);
        man.output(js);
        // The bound invariants are part of the exit contract.
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double gap = curve.outer[i] - curve.inner[i];
            if (gap < 0.0 || gap > std::log2(std::exp(1.0)) + 1e-9)
                throw std::runtime_error("bound invariant violated at " + std::to_string(grid[i]) + " dBm");
        }
    }
    man.set("cache", {{"hit", t.hit}});
    man.commit();
    std::cout << "bounds: " << grid.size() << " points x " << cfg.num_users << " users -> " << o.out << "\n";
    return 0;
}

std::string power_tag(double dbm) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << dbm;
    return os.str();
}

int cmd_region(const Options& o) {
    const SystemConfig cfg = load(o);
    const std::vector<double> grid = parse_power_grid(o.powers.empty() ? "1.1" : o.powers);
    const std::size_t mc = o.mc_samples ? o.mc_samples : 100000;
    Manifest man("region", cfg, o, {{"powers", grid}, {"seed", o.seed}, {"psk_order", o.psk_order}, {"mc_samples", mc}});
    const CachedTable t = coefficient_table(cfg, o);
    const double s2 = ase_variance(cfg);
    const int K = cfg.num_users;
    for (double dbm : grid) {
        const std::vector<double> powers(K, dbm_to_w(dbm));
        std::vector<double> nli(K);
        for (int k = 0; k < K; ++k)
            nli[k] = 0.5 * nli_variance(k, powers, t.table, InputLaw::disk(), 1000000, o.seed).variance;
        const RateRegion outer = outer_region(powers, t.table, s2);
        const RateRegion tin = tin_region(powers, t.table, s2, nli);
        const TimeshareVertices tv = timeshare_vertices(powers, t.table, s2, o.psk_order, mc, o.seed);
        std::vector<double> tol;
        for (const auto& e : tv.errors) tol.push_back(3.0 * *std::max_element(e.begin(), e.end()));
        const RateRegion ts = timeshare_region(tv.vertices, tol);
        for (const auto& v : ts.vertices)
            if (!contains(outer, v)) throw std::runtime_error("timeshare vertex outside the outer region");
        for (const auto& v : tin.vertices)
            if (!contains(outer, v)) throw std::runtime_error("tin vertex outside the outer region");
        const json prov = {{"manifest", man.id()}, {"power_dBm", dbm}, {"sigma_sq_per_dim_w", s2}};
        for (const RateRegion* r : {&outer, &tin, &ts}) {
            const std::string stem = "region_" + kind_name(r->kind) + "_" + power_tag(dbm) + "dBm";
            const fs::path js = fs::path(o.out) / (stem + ".json");
            const fs::path csv = fs::path(o.out) / (stem + "_facets.csv");
            write_atomic(js, region_json(*r, prov.dump()));
            write_atomic(csv, region_facets_csv(*r));
            man.output(js);
            man.output(csv);
        }
        double beyond = -INFINITY;
        for (const auto& v : ts.vertices) beyond = std::max(beyond, excess(tin, v));
        std::cout << "region " << power_tag(dbm) << " dBm: timeshare exceeds TIN cuboid by " << beyond << " bit\n";
    }
    man.commit();
    return 0;
}

// Checkpoint lines: power,user,scenario,mi,estimator,seed,n,se,snr_db
std::string checkpoint_line(const Fig8Row& r) {
    std::string row = fig8_csv_row(r);
    row.pop_back();
    std::ostringstream os;
    os << std::setprecision(17) << row << ',' << r.standard_error << ',' << r.snr_db << '\n';
    return os.str();
}

Fig8Row parse_checkpoint_line(const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 9) throw std::runtime_error("corrupt checkpoint line: " + line);
    Fig8Row r;
    r.power_dbm = std::stod(f[0]);
    r.user = std::stoi(f[1]) - 1;
    r.scenario = parse_scenario(f[2]);
    r.mi_bits = std::stod(f[3]);
    r.estimator = parse_estimator(f[4]);
    r.seed = std::stoull(f[5]);
    r.n = std::stoull(f[6]);
    r.standard_error = std::stod(f[7]);
    r.snr_db = std::stod(f[8]);
    return r;
}

int cmd_ssfm(const Options& o) {
    const SystemConfig cfg = load(o);
    const Scenario sc = parse_scenario(o.scenario);
    const std::vector<double> grid = parse_power_grid(o.powers.empty() ? "-12:9:3" : o.powers);
    Manifest man("ssfm", cfg, o, {{"powers", grid}, {"seed", o.seed}, {"scenario", o.scenario}, {"psk_order", o.psk_order}});
    fs::create_directories(o.out);
    const std::string stem = "ssfm_" + o.scenario;
    const fs::path ckpt = fs::path(o.out) / (stem + ".checkpoint");
    const std::string key = "# run " + man.id() + "\n";

    std::map<long long, Fig8Row> done;
    if (fs::exists(ckpt)) {
        std::istringstream in(read_file(ckpt));
        std::string line;
        std::getline(in, line);
        if (line + "\n" == key) {
            while (std::getline(in, line))
                if (!line.empty()) {
                    const Fig8Row r = parse_checkpoint_line(line);
                    done[std::llround(r.power_dbm * 1000.0)] = r;
                }
        }
    }
    if (done.empty()) write_atomic(ckpt, key);

    long computed = 0;
    for (double p : grid) {
        const long long tag = std::llround(p * 1000.0);
        if (done.count(tag)) continue;
        if (o.max_points >= 0 && computed >= o.max_points) {
            man.set("status", "partial");
            man.commit();
            throw Partial("stopped after " + std::to_string(computed) + " new point(s); rerun to resume");
        }
        const auto t0 = std::chrono::steady_clock::now();
        const Fig8Row r = fig8_point(cfg, p, sc, o.seed, o.psk_order);
        done[tag] = r;
        std::ofstream(ckpt, std::ios::app) << checkpoint_line(r);
        ++computed;
        std::cerr << "ssfm " << o.scenario << " " << p << " dBm: " << r.mi_bits << " bit, SNR " << r.snr_db << " dB ("
                  << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s)\n";
    }

    std::string csv = fig8_csv_header();
    json points = json::array();
    for (double p : grid) {
        const Fig8Row& r = done.at(std::llround(p * 1000.0));
        csv += fig8_csv_row(r);
        points.push_back({{"power_dBm", r.power_dbm}, {"mi_bits", r.mi_bits}, {"standard_error", r.standard_error}, {"snr_db", r.snr_db}});
    }
    const fs::path out_csv = fs::path(o.out) / (stem + ".csv");
    const fs::path out_json = fs::path(o.out) / (stem + ".json");
    write_atomic(out_csv, csv);
    json prov = {{"manifest", man.id()},
                 {"scenario", o.scenario},
                 {"seed", o.seed},
                 {"symbols", cfg.ssfm.symbols},
                 {"samples_per_symbol", cfg.ssfm.samples_per_symbol},
                 {"step_km", cfg.ssfm.step_km},
                 {"dbp_step_km", cfg.ssfm.dbp_step_km},
                 {"sigma_sq_per_dim_w", ase_variance(cfg)},
                 {"points", points}};
    write_atomic(out_json, prov.dump(2) + "\n");
    man.output(out_csv);
    man.output(out_json);
    man.set("status", "complete");
    man.commit();
    std::cout << "ssfm: " << out_csv.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Capacity bounds for the nonlinear WDM interference channel"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Options o;

    auto common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "flat key=value config file (default: Table I link)")
            ->envname("XPMCAP_CONFIG")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory")->envname("XPMCAP_OUT");
        sub->add_option("--seed", o.seed, "base seed")->envname("XPMCAP_SEED");
    };
    auto* coeffs = app.add_subcommand("coeffs", "compute the coupling coefficient table");
    common(coeffs);
    auto* bounds = app.add_subcommand("bounds", "TIN, inner and outer bound curves");
    common(bounds);
    bounds->add_option("--powers", o.powers, "start:stop:step in dBm (default -15:5:0.5)")->envname("XPMCAP_POWERS");
    bounds->add_option("--mc-samples", o.mc_samples, "NLI Monte-Carlo samples (default 1e6)")->envname("XPMCAP_MC_SAMPLES");
    auto* region = app.add_subcommand("region", "outer, TIN and time-sharing regions at given powers");
    common(region);
    region->add_option("--powers", o.powers, "power(s) in dBm (default 1.1)")->envname("XPMCAP_POWERS");
    region->add_option("--psk-order", o.psk_order, "PSK order of the interferers")->envname("XPMCAP_PSK_ORDER")->check(CLI::Range(2, 1 << 16));
    region->add_option("--mc-samples", o.mc_samples, "symbols per PSK rate estimate (default 1e5)")->envname("XPMCAP_MC_SAMPLES");
    auto* ssfm = app.add_subcommand("ssfm", "split-step simulation of the Table II scenarios");
    common(ssfm);
    ssfm->add_option("--scenario", o.scenario, "tin | lower-bound")->envname("XPMCAP_SCENARIO")->required()->check(CLI::IsMember({"tin", "lower-bound"}));
    ssfm->add_option("--powers", o.powers, "start:stop:step in dBm (default -12:9:3)")->envname("XPMCAP_POWERS");
    ssfm->add_option("--psk-order", o.psk_order, "PSK order of the interferers")->envname("XPMCAP_PSK_ORDER")->check(CLI::Range(2, 1 << 16));
    ssfm->add_option("--max-points", o.max_points, "stop after computing this many new points (checkpoint kept)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*coeffs) return cmd_coeffs(o);
        if (*bounds) return cmd_bounds(o);
        if (*region) return cmd_region(o);
        if (*ssfm) return cmd_ssfm(o);
    } catch (const Partial& e) {
        std::cerr << "xpmcap: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "xpmcap: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "xpmcap: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "xpmcap: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
