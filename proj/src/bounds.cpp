// SPDX-License-Identifier: Apache-2.0
#include "xpmcap/bounds.hpp"

#include "xpmcap/channel.hpp"
#include "xpmcap/mi.hpp"
#include "xpmcap/units.hpp"

#include <json.hpp>

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace xpmcap {

std::vector<double> parse_power_grid(const std::string& spec) {
    auto num = [&](const std::string& s) {
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != s.size()) throw std::invalid_argument("bad power grid '" + spec + "': expected start:stop:step");
        return v;
    };
    const auto a = spec.find(':');
    if (a == std::string::npos) return {num(spec)};
    const auto b = spec.find(':', a + 1);
    if (b == std::string::npos) throw std::invalid_argument("bad power grid '" + spec + "': expected start:stop:step");
    const double start = num(spec.substr(0, a)), stop = num(spec.substr(a + 1, b - a - 1)), step = num(spec.substr(b + 1));
    if (!(step > 0.0) || stop < start) throw std::invalid_argument("bad power grid '" + spec + "': need step > 0, stop >= start");
    std::vector<double> out;
    const long count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(start + i * step);
    return out;
}

namespace {

void check_user(int k, const std::vector<double>& powers, const CoefficientTable& table) {
    if (static_cast<int>(powers.size()) != table.num_users()) throw std::invalid_argument("powers size != number of users");
    if (k < 0 || k >= table.num_users()) throw std::out_of_range("user index");
    for (double p : powers)
        if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("powers must be finite and >= 0");
}

double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }

}  // namespace

double aggregate_gain(int k, const std::vector<double>& powers, const CoefficientTable& table) {
    check_user(k, powers, table);
    double a = 0.0;
    for (int w = 0; w < table.num_users(); ++w) {
        if (w == k) continue;
        double s = 0.0;
        for (int m = -table.memory(); m <= table.memory(); ++m) s += table.c(k, w, m);
        a += powers[w] * s;
    }
    return a;
}

double interference_sum(int k, const std::vector<std::vector<double>>& power_by_lag, const CoefficientTable& table) {
    if (static_cast<int>(power_by_lag.size()) != table.num_users()) throw std::invalid_argument("interference_sum: users");
    double a = 0.0;
    for (int w = 0; w < table.num_users(); ++w) {
        if (w == k) continue;
        if (static_cast<int>(power_by_lag[w].size()) != table.lags()) throw std::invalid_argument("interference_sum: lags");
        for (int m = -table.memory(); m <= table.memory(); ++m) a += table.c(k, w, m) * power_by_lag[w][m + table.memory()];
    }
    return a;
}

double outer_bound(int k, const std::vector<double>& powers, const CoefficientTable& table, double sigma_sq) {
    if (!(sigma_sq > 0.0)) throw std::invalid_argument("outer_bound: sigma_sq must be > 0");
    const double a = aggregate_gain(k, powers, table);
    return log2_1p(powers[k] / (2.0 * sigma_sq) * (1.0 + a * a));
}

double inner_bound(int k, const std::vector<double>& powers, const CoefficientTable& table, double sigma_sq) {
    if (!(sigma_sq > 0.0)) throw std::invalid_argument("inner_bound: sigma_sq must be > 0");
    const double a = aggregate_gain(k, powers, table);
    return log2_1p(powers[k] / (2.0 * sigma_sq * std::numbers::e) * (1.0 + a * a));
}

double tin_bound(double peak_power, double sigma_sq, double sigma_nli_sq) {
    if (!(sigma_sq > 0.0) || sigma_nli_sq < 0.0) throw std::invalid_argument("tin_bound: need sigma_sq > 0, sigma_nli_sq >= 0");
    return log2_1p(peak_power / (2.0 * (sigma_sq + sigma_nli_sq) * std::numbers::e));
}

double awgn_reference(double peak_power, double sigma_sq) {
    if (!(sigma_sq > 0.0)) throw std::invalid_argument("awgn_reference: sigma_sq must be > 0");
    return log2_1p(peak_power / (2.0 * sigma_sq));
}

NliEstimate nli_variance(int k, const std::vector<double>& powers, const CoefficientTable& table, const InputLaw& law,
                         std::size_t mc_samples, std::uint64_t seed) {
    check_user(k, powers, table);
    if (mc_samples < 10000) throw std::invalid_argument("nli_variance: mc_samples must be >= 1e4");

    // Flatten the nonzero taps: (coefficient, peak power of its user).
    std::vector<double> coef, peak;
    for (int w = 0; w < table.num_users(); ++w) {
        if (w == k) continue;
        for (int m = -table.memory(); m <= table.memory(); ++m) {
            const double c = table.c(k, w, m);
            if (c == 0.0) continue;
            coef.push_back(c);
            peak.push_back(powers[w]);
        }
    }

    NliEstimate out;
    out.samples = mc_samples;
    out.seed = seed;
    out.law = law.id();

    double mean_z = 0.0, var_z = 0.0;
    for (std::size_t i = 0; i < coef.size(); ++i) {
        mean_z += coef[i] * peak[i] * law.second_moment();
        var_z += coef[i] * coef[i] * peak[i] * peak[i] * (law.fourth_moment() - law.second_moment() * law.second_moment());
    }
    out.closed_form = powers[k] * law.second_moment() * (mean_z * mean_z + var_z);
    if (coef.empty()) return out;

    auto rng = substream(seed, stream::nli, static_cast<std::uint64_t>(k));
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t s = 0; s < mc_samples; ++s) {
        const double xk = law.draw_power(rng, powers[k]);
        double z = 0.0;
        for (std::size_t i = 0; i < coef.size(); ++i) z += coef[i] * law.draw_power(rng, peak[i]);
        const double v = xk * z * z;
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(mc_samples);
    out.variance = sum / n;
    out.standard_error = std::sqrt(std::max(0.0, sum2 / n - out.variance * out.variance) / n);
    return out;
}

RateEstimate psk_interferer_rate(int user, int focus, const std::vector<double>& powers, const CoefficientTable& table,
                                 double sigma_sq, int psk_order, std::size_t mc_samples, std::uint64_t seed) {
    check_user(user, powers, table);
    check_user(focus, powers, table);
    if (user == focus) throw std::invalid_argument("psk_interferer_rate: user must differ from focus");
    if (psk_order < 2) throw std::invalid_argument("psk_interferer_rate: psk_order must be >= 2");
    if (!(powers[user] > 0.0)) throw std::invalid_argument("psk_interferer_rate: user power must be > 0");

    const int K = table.num_users();
    std::vector<InputLaw> laws(K, InputLaw::psk(psk_order));
    laws[focus] = InputLaw::disk();
    const SymbolFrame x = random_frame(laws, powers, mc_samples, seed);
    NoiseModel noise{std::vector<double>(K, sigma_sq), seed ^ 0x9e3779b97f4a7c15ULL};
    const SymbolFrame y = simulate_simplified(x, table, noise);
    const MiEstimate mi = estimate_mi(x.symbols[user], y.symbols[user], MiEstimator::gaussian_auxiliary,
                                      InputLaw::psk(psk_order), powers[user]);
    return {mi.bits, mi.standard_error};
}

BoundCurve bound_curve(int k, const std::vector<double>& power_dbm, const CoefficientTable& table, double sigma_sq,
                       const NliSettings& nli) {
    const int K = table.num_users();
    if (k < 0 || k >= K) throw std::out_of_range("bound_curve: user index");
    BoundCurve curve;
    curve.user = k;
    curve.sigma_sq = sigma_sq;
    curve.nli = nli;
    // For a fixed law the NLI second moment is homogeneous of degree 3 in
    // a common power, so one estimate serves the whole grid.
    const double pref = nli.reference_power_w;
    curve.nli_reference = nli_variance(k, std::vector<double>(K, pref), table, InputLaw::parse(nli.law), nli.samples, nli.seed);
    for (double dbm : power_dbm) {
        const double p = dbm_to_w(dbm);
        const std::vector<double> powers(K, p);
        const double ratio = p / pref;
        const double nli_dim = 0.5 * curve.nli_reference.variance * ratio * ratio * ratio;
        curve.power_dbm.push_back(dbm);
        curve.sigma_nli_sq.push_back(nli_dim);
        curve.tin.push_back(tin_bound(p, sigma_sq, nli_dim));
        curve.inner.push_back(inner_bound(k, powers, table, sigma_sq));
        curve.outer.push_back(outer_bound(k, powers, table, sigma_sq));
        curve.awgn.push_back(awgn_reference(p, sigma_sq));
    }
    return curve;
}

std::string bound_curve_csv(const BoundCurve& curve) {
    std::ostringstream os;
    os << std::setprecision(17) << "power_dBm,tin,inner,outer,sigma_nli,awgn_reference\n";
    for (std::size_t i = 0; i < curve.power_dbm.size(); ++i)
        os << curve.power_dbm[i] << ',' << curve.tin[i] << ',' << curve.inner[i] << ',' << curve.outer[i] << ','
           << curve.sigma_nli_sq[i] << ',' << curve.awgn[i] << '\n';
    return os.str();
}

std::string bound_curve_json(const BoundCurve& curve, const std::string& extra_provenance_json) {
    nlohmann::ordered_json j;
    j["user"] = curve.user + 1;
    j["power_dBm"] = curve.power_dbm;
    j["tin"] = curve.tin;
    j["inner"] = curve.inner;
    j["outer"] = curve.outer;
    j["awgn_reference"] = curve.awgn;
    j["sigma_nli_sq_per_dim_w"] = curve.sigma_nli_sq;
    j["sigma_sq_per_dim_w"] = curve.sigma_sq;
    j["provenance"] = {
        {"config_hash", curve.config_hash},
        {"nli_law", curve.nli.law},
        {"nli_samples", curve.nli.samples},
        {"nli_seed", curve.nli.seed},
        {"nli_reference_power_w", curve.nli.reference_power_w},
        {"nli_reference_variance_w", curve.nli_reference.variance},
        {"nli_reference_standard_error_w", curve.nli_reference.standard_error},
        {"nli_reference_closed_form_w", curve.nli_reference.closed_form},
        {"extra", nlohmann::ordered_json::parse(extra_provenance_json)},
    };
    return j.dump(2) + "\n";
}

}  // namespace xpmcap
