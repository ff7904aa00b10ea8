// SPDX-License-Identifier: Apache-2.0
#include "xpmcap/ssfm.hpp"

#include "xpmcap/hash.hpp"
#include "xpmcap/simd.hpp"
#include "xpmcap/units.hpp"
#include "xpmcap/waveform.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace xpmcap {

double FieldGrid::energy() const { return simd::active().energy(samples.data(), samples.size()) * dt; }

SsfmPlan SsfmPlan::from_config(const SystemConfig& cfg) {
    SsfmPlan p;
    p.step_km = cfg.ssfm.step_km;
    p.length_km = cfg.span_length_km;
    p.alpha_per_km = cfg.alpha();
    p.beta2 = cfg.beta2();
    p.gamma = cfg.gamma_per_w_km;
    p.amplify = true;
    p.ase_sigma_sq = ase_variance(cfg);
    return p;
}

int SsfmPlan::steps() const {
    if (length_km == 0.0) return 0;
    if (!(step_km > 0.0) || !(length_km > 0.0)) throw std::invalid_argument("SsfmPlan: step and length must be > 0");
    const double ratio = length_km / step_km;
    const double steps = std::round(ratio);
    if (steps < 1.0 || std::abs(ratio - steps) > 1e-6 * std::max(1.0, ratio))
        throw std::invalid_argument("SsfmPlan: step_km does not divide length_km");
    return static_cast<int>(steps);
}

namespace {

long signed_bin(std::size_t k, std::size_t n) {
    const long kk = static_cast<long>(k), nn = static_cast<long>(n);
    return kk < (nn + 1) / 2 ? kk : kk - nn;
}

std::size_t wrap(long b, std::size_t n) {
    const long nn = static_cast<long>(n);
    long r = b % nn;
    if (r < 0) r += nn;
    return static_cast<std::size_t>(r);
}

long channel_bin(double offset_hz, int symbols, double symbol_rate) {
    const double b = offset_hz * symbols / symbol_rate;
    const double r = std::round(b);
    if (std::abs(b - r) > 1e-6) throw std::invalid_argument("channel centre is not on a DFT bin; choose a frame length that makes spacing*n/Rs integral");
    return static_cast<long>(r);
}

double spectral_edge_fraction(const cvec& spec) {
    const std::size_t n = spec.size();
    const std::size_t edge = std::max<std::size_t>(1, n / 64);
    const auto& k = simd::active();
    const double total = k.energy(spec.data(), n);
    if (total == 0.0) return 0.0;
    // bins around Nyquist: indices n/2 - edge .. n/2 + edge
    return k.energy(spec.data() + n / 2 - edge, 2 * edge) / total;
}

// Integrates the NLSE over `steps` steps of size h; `omega_abs` is the
// absolute angular frequency of each bin relative to the reference frame.
void split_step(cvec& field, const std::vector<double>& omega_abs, double beta2, double gamma, double alpha, double h,
                int steps) {
    if (steps == 0) return;
    const std::size_t n = field.size();
    const Fft fft(n, Fft::Layout::aligned);
    Fft::Buffer a(n), half(n), full(n);
    // The inverse transform's 1/N rides on the linear factors.
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = omega_abs[k];
        const double phase = -0.5 * beta2 * w * w;
        half.data()[k] = inv_n * std::exp(cd(-0.25 * alpha * h, 0.5 * phase * h));
        full.data()[k] = inv_n * std::exp(cd(-0.5 * alpha * h, phase * h));
    }
    std::copy(field.begin(), field.end(), a.data());
    const auto& kern = simd::active();
    fft.forward(a);
    kern.cmul(a.data(), half.data(), n);
    for (int s = 0; s < steps; ++s) {
        fft.inverse_unscaled(a);
        kern.kerr_rotate(a.data(), n, -gamma * h);
        fft.forward(a);
        kern.cmul(a.data(), s + 1 < steps ? full.data() : half.data(), n);
    }
    fft.inverse_unscaled(a);
    std::copy(a.data(), a.data() + n, field.begin());
}

}  // namespace

FieldGrid wdm_mux(const SymbolFrame& frame, const SystemConfig& cfg) {
    frame.check_peak();
    const int K = frame.num_users();
    const int n = static_cast<int>(frame.length());
    const int sps = cfg.ssfm.samples_per_symbol;
    if (K < 1 || n < 1) throw std::invalid_argument("wdm_mux: empty frame");
    const double rs = cfg.symbol_rate();
    const double fs = sps * rs;
    const double spacing = cfg.channel_spacing_ghz * 1e9;
    if (fs < K * spacing + 50e9)
        throw std::invalid_argument("wdm_mux: grid bandwidth below K*spacing + 50 GHz guard; raise ssfm_samples_per_symbol");

    FieldGrid f;
    f.symbols = n;
    f.samples_per_symbol = sps;
    f.dt = 1.0 / fs;
    const std::size_t N = static_cast<std::size_t>(n) * sps;
    cvec spec(N, cd{});
    Fft small(n);
    for (int k = 0; k < K; ++k) {
        const double off = (k - 0.5 * (K - 1)) * spacing;
        f.offsets_hz.push_back(off);
        const long ob = channel_bin(off, n, rs);
        cvec x = frame.symbols[k];
        small.forward(x);
        const long reach = static_cast<long>(std::ceil((1.0 + cfg.rolloff) * n / 2.0)) + 1;
        for (long b = -reach; b <= reach; ++b) {
            const double fb = b * rs / n;
            const double h = rrc_response(fb, rs, cfg.rolloff);
            if (h == 0.0) continue;
            spec[wrap(b + ob, N)] += static_cast<double>(sps) * h * x[wrap(b, n)];
        }
    }
    Fft big(N);
    big.inverse(spec);
    f.samples = std::move(spec);
    return f;
}

FieldGrid ssfm_propagate(FieldGrid field, const SsfmPlan& plan, std::uint64_t seed) {
    const int steps = plan.steps();
    const std::size_t N = field.samples.size();
    Fft fft(N);
    std::vector<double> omega(N);
    for (std::size_t k = 0; k < N; ++k) omega[k] = bin_omega(k, N, field.dt);

    split_step(field.samples, omega, plan.beta2, plan.gamma, plan.alpha_per_km, steps ? plan.length_km / steps : 0.0,
               steps);

    const double e = field.energy();
    if (!std::isfinite(e)) throw NumericalError("ssfm_propagate: field energy is not finite");
    cvec spec = field.samples;
    fft.forward(spec);
    if (spectral_edge_fraction(spec) > 1e-6)
        throw NumericalError("ssfm_propagate: spectral energy at the grid edge above 1e-6 (aliasing); raise ssfm_samples_per_symbol");

    if (plan.amplify && plan.alpha_per_km > 0.0) {
        const double g = std::exp(0.5 * plan.alpha_per_km * plan.length_km);
        for (auto& a : field.samples) a *= g;
    }
    if (plan.ase_sigma_sq > 0.0) {
        // White over the grid: per-sample variance scales with fs/Rs.
        const double sd = std::sqrt(plan.ase_sigma_sq * field.samples_per_symbol);
        auto rng = substream(seed, stream::ase, 0);
        for (auto& a : field.samples) a += complex_normal(rng, sd);
    }
    return field;
}

namespace {

struct Demuxed {
    cvec samples;
    double dt;
    std::vector<double> omega_abs;
};

Demuxed demux(const FieldGrid& field, int k, const SystemConfig& cfg) {
    if (k < 0 || k >= static_cast<int>(field.offsets_hz.size())) throw std::out_of_range("receiver_chain: user index");
    const int n = field.symbols;
    const int sps = cfg.ssfm.dbp_samples_per_symbol;
    if (sps > field.samples_per_symbol) throw std::invalid_argument("receiver_chain: dbp_samples_per_symbol above grid rate");
    const double rs = field.symbol_rate();
    const std::size_t N = field.samples.size();
    const std::size_t Ns = static_cast<std::size_t>(n) * sps;
    const long ob = channel_bin(field.offsets_hz[k], n, rs);

    cvec spec = field.samples;
    Fft big(N);
    big.forward(spec);
    Demuxed d;
    d.samples.assign(Ns, cd{});
    d.dt = 1.0 / (sps * rs);
    d.omega_abs.resize(Ns);
    const double edge = (1.0 + cfg.rolloff) * rs / 2.0;
    const double scale = static_cast<double>(Ns) / static_cast<double>(N);
    for (std::size_t i = 0; i < Ns; ++i) {
        const long b = signed_bin(i, Ns);
        const double fb = b * rs / n;
        d.omega_abs[i] = 2.0 * std::numbers::pi * (fb + field.offsets_hz[k]);
        if (std::abs(fb) > edge * (1.0 + 1e-12)) continue;
        d.samples[i] = spec[wrap(b + ob, N)] * scale;
    }
    Fft small(Ns);
    small.inverse(d.samples);
    return d;
}

cvec matched_filter(const Demuxed& d, int n, const SystemConfig& cfg) {
    const std::size_t Ns = d.samples.size();
    const int sps = static_cast<int>(Ns / n);
    const double rs = cfg.symbol_rate();
    cvec spec = d.samples;
    Fft small(Ns);
    small.forward(spec);
    cvec folded(n, cd{});
    for (std::size_t i = 0; i < Ns; ++i) {
        const long b = signed_bin(i, Ns);
        const double h = rrc_response(b * rs / n, rs, cfg.rolloff);
        if (h == 0.0) continue;
        folded[wrap(b, n)] += spec[i] * h;
    }
    Fft sym(n);
    sym.inverse(folded);
    for (auto& y : folded) y /= static_cast<double>(sps);
    return folded;
}

}  // namespace

cvec receiver_chain(const FieldGrid& field, int k, const SystemConfig& cfg) {
    Demuxed d = demux(field, k, cfg);
    const double L = cfg.span_length_km;
    if (L > 0.0) {
        // Undo the amplifier so the DBP starts at the physical span-end power.
        const double back = std::exp(-0.5 * cfg.alpha() * L);
        for (auto& a : d.samples) a *= back;
        const double ratio = L / cfg.ssfm.dbp_step_km;
        const int steps = std::max(1, static_cast<int>(std::round(ratio)));
        split_step(d.samples, d.omega_abs, -cfg.beta2(), -cfg.gamma_per_w_km, -cfg.alpha(), L / steps, steps);
    }
    return matched_filter(d, field.symbols, cfg);
}

cvec receiver_chain_no_dbp(const FieldGrid& field, int k, const SystemConfig& cfg) {
    Demuxed d = demux(field, k, cfg);
    const double L = cfg.span_length_km;
    if (L > 0.0) {
        // Dispersion only: the linear part of the inverse with the loss already undone by the amplifier.
        split_step(d.samples, d.omega_abs, -cfg.beta2(), 0.0, 0.0, L, 1);
    }
    return matched_filter(d, field.symbols, cfg);
}

double effective_snr(const cvec& x, const cvec& y) {
    if (x.size() != y.size() || x.empty()) throw std::invalid_argument("effective_snr: size mismatch");
    cd xy{};
    double xx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xy += y[i] * std::conj(x[i]);
        xx += std::norm(x[i]);
    }
    const cd h = xy / xx;
    double r = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) r += std::norm(y[i] - h * x[i]);
    return std::norm(h) * xx / r;
}

std::string scenario_name(Scenario s) { return s == Scenario::tin ? "tin" : "lower-bound"; }

Scenario parse_scenario(const std::string& name) {
    if (name == "tin") return Scenario::tin;
    if (name == "lower-bound") return Scenario::lower_bound;
    throw std::invalid_argument("unknown scenario '" + name + "' (expected tin or lower-bound)");
}

std::uint64_t point_seed(std::uint64_t seed, Scenario s, double power_dbm) {
    std::ostringstream os;
    os << scenario_name(s) << ':' << seed << ':' << std::llround(power_dbm * 1000.0);
    return fnv1a(os.str());
}

Fig8Row fig8_point(const SystemConfig& cfg, double power_dbm, Scenario scenario, std::uint64_t seed, int psk_order) {
    const int K = cfg.num_users;
    const int focus = (K - 1) / 2;
    const double p = dbm_to_w(power_dbm);
    std::vector<InputLaw> laws(K, InputLaw::disk());
    if (scenario == Scenario::lower_bound)
        for (int w = 0; w < K; ++w)
            if (w != focus) laws[w] = InputLaw::psk(psk_order);
    const std::uint64_t s = point_seed(seed, scenario, power_dbm);
    const SymbolFrame x = random_frame(laws, std::vector<double>(K, p), cfg.ssfm.symbols, s);
    FieldGrid field = wdm_mux(x, cfg);
    field = ssfm_propagate(std::move(field), SsfmPlan::from_config(cfg), s);
    const cvec y = receiver_chain(field, focus, cfg);
    const MiEstimate mi = estimate_mi(x.symbols[focus], y, MiEstimator::gaussian_auxiliary, laws[focus], p);
    Fig8Row row;
    row.power_dbm = power_dbm;
    row.user = focus;
    row.scenario = scenario;
    row.mi_bits = mi.bits;
    row.standard_error = mi.standard_error;
    row.estimator = mi.estimator;
    row.seed = seed;
    row.n = x.length();
    row.snr_db = 10.0 * std::log10(effective_snr(x.symbols[focus], y));
    return row;
}

std::vector<Fig8Row> fig8_experiment(const SystemConfig& cfg, const std::vector<double>& power_dbm, Scenario scenario,
                                     const std::vector<std::uint64_t>& seeds, int psk_order) {
    std::vector<Fig8Row> rows;
    for (std::uint64_t seed : seeds)
        for (double p : power_dbm) rows.push_back(fig8_point(cfg, p, scenario, seed, psk_order));
    return rows;
}

std::string fig8_csv_header() { return "power_dBm,user,scenario,mi_bits,estimator,seed,n\n"; }

std::string fig8_csv_row(const Fig8Row& r) {
    std::ostringstream os;
    os << std::setprecision(17) << r.power_dbm << ',' << r.user + 1 << ',' << scenario_name(r.scenario) << ',' << r.mi_bits
       << ',' << estimator_name(r.estimator) << ',' << r.seed << ',' << r.n << '\n';
    return os.str();
}

}  // namespace xpmcap
