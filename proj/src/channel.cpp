// SPDX-License-Identifier: Apache-2.0
#include "xpmcap/channel.hpp"

#include "xpmcap/simd.hpp"

#include <cmath>

namespace xpmcap {

namespace {
constexpr double kPlanck = 6.62607015e-34;  // J s
}

cd SymbolFrame::at(int k, long i) const {
    const auto& row = symbols.at(k);
    if (i < 0 || i >= static_cast<long>(row.size())) return {};
    return row[i];
}

void SymbolFrame::check_peak() const {
    if (peak_power.size() != symbols.size()) throw std::invalid_argument("SymbolFrame: peak_power size mismatch");
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        if (symbols[k].size() != length()) throw std::invalid_argument("SymbolFrame: ragged frame");
        const double limit = peak_power[k] * (1.0 + 1e-12);
        for (std::size_t i = 0; i < symbols[k].size(); ++i)
            if (std::norm(symbols[k][i]) > limit)
                throw PeakPowerError("peak power violated: user " + std::to_string(k + 1) + ", symbol " +
                                     std::to_string(i + 1));
    }
}

double ase_variance_formula(const SystemConfig& cfg) {
    const double gain = cfg.span_gain();
    const double nsp = std::pow(10.0, cfg.noise_figure_db / 10.0) / 2.0;
    const double nu = cfg.carrier_frequency_thz * 1e12;
    return 0.5 * nsp * (gain - 1.0) * kPlanck * nu * cfg.symbol_rate();
}

double ase_variance(const SystemConfig& cfg) {
    return cfg.noise_variance_w ? *cfg.noise_variance_w : ase_variance_formula(cfg);
}

SymbolFrame random_frame(const std::vector<InputLaw>& laws, const std::vector<double>& peak_power, std::size_t n,
                         std::uint64_t seed) {
    if (laws.size() != peak_power.size()) throw std::invalid_argument("random_frame: laws/powers size mismatch");
    SymbolFrame f;
    f.peak_power = peak_power;
    f.symbols.resize(laws.size());
    for (std::size_t k = 0; k < laws.size(); ++k) {
        auto rng = substream(seed, stream::symbols, k);
        f.symbols[k].resize(n);
        for (auto& s : f.symbols[k]) s = laws[k].draw(rng, peak_power[k]);
    }
    return f;
}

namespace {

void add_noise(SymbolFrame& out, const NoiseModel& noise) {
    if (noise.sigma_sq.size() != out.symbols.size()) throw std::invalid_argument("NoiseModel: size mismatch");
    for (std::size_t k = 0; k < out.symbols.size(); ++k) {
        const double s2 = noise.sigma_sq[k];
        if (s2 < 0.0 || !std::isfinite(s2)) throw std::invalid_argument("NoiseModel: sigma_sq must be >= 0");
        if (s2 == 0.0) continue;
        auto rng = substream(noise.seed, stream::noise, k);
        const double sd = std::sqrt(s2);
        for (auto& y : out.symbols[k]) y += complex_normal(rng, sd);
    }
}

void check_table(const SymbolFrame& frame, int table_users) {
    if (frame.num_users() != table_users) throw std::invalid_argument("frame and table disagree on number of users");
}

}  // namespace

std::vector<double> xpm_phase(const SymbolFrame& frame, const CoefficientTable& table, int k) {
    const std::size_t n = frame.length();
    const auto& kern = simd::active();
    std::vector<double> phase(n, 0.0), power(n);
    for (int w = 0; w < frame.num_users(); ++w) {
        if (w == k) continue;
        for (std::size_t i = 0; i < n; ++i) power[i] = std::norm(frame.symbols[w][i]);
        kern.lag_sum(power.data(), n, table.taps(k, w), table.memory(), phase.data());
    }
    return phase;
}

SymbolFrame simulate_simplified(const SymbolFrame& frame, const CoefficientTable& table, const NoiseModel& noise) {
    frame.check_peak();
    check_table(frame, table.num_users());
    SymbolFrame out = frame;
    for (int k = 0; k < frame.num_users(); ++k) {
        const std::vector<double> phase = xpm_phase(frame, table, k);
        auto& y = out.symbols[k];
        for (std::size_t i = 0; i < y.size(); ++i) y[i] *= cd(1.0, phase[i]);
    }
    add_noise(out, noise);
    return out;
}

std::size_t FirstOrderTable::index(int p, int l, int m) const {
    const int t = truncation, w = width();
    if (std::abs(p) > t || std::abs(l) > t || std::abs(m) > t) throw std::out_of_range("FirstOrderTable: lag");
    return static_cast<std::size_t>(((p + t) * w + (l + t)) * w + (m + t));
}

FirstOrderTable compute_first_order_table(const SystemConfig& cfg, int truncation) {
    cfg.validate();
    if (truncation < 0 || truncation > cfg.memory)
        throw std::invalid_argument("compute_first_order_table: truncation must be in [0, memory]");
    FirstOrderTable t;
    t.num_users = cfg.num_users;
    t.truncation = truncation;
    t.gamma = cfg.gamma_per_w_km;
    std::vector<LagTriple> lags;
    for (int p = -truncation; p <= truncation; ++p)
        for (int l = -truncation; l <= truncation; ++l)
            for (int m = -truncation; m <= truncation; ++m) lags.push_back({p, l, m});
    for (int d = 1; d < cfg.num_users; ++d) t.S.push_back(collision_integrals(d, lags, cfg));
    return t;
}

SymbolFrame simulate_first_order(const SymbolFrame& frame, const FirstOrderTable& table, const NoiseModel& noise) {
    frame.check_peak();
    check_table(frame, table.num_users);
    const long n = static_cast<long>(frame.length());
    const int t = table.truncation;
    SymbolFrame out = frame;
    for (int k = 0; k < frame.num_users(); ++k) {
        for (long i = 0; i < n; ++i) {
            cd acc{};
            for (int w = 0; w < frame.num_users(); ++w) {
                if (w == k) continue;
                const int d = std::abs(k - w);
                for (int p = -t; p <= t; ++p) {
                    const cd xk = frame.at(k, i - p);
                    if (xk == cd{}) continue;
                    for (int l = -t; l <= t; ++l) {
                        const cd xl = frame.at(w, i - l);
                        if (xl == cd{}) continue;
                        for (int m = -t; m <= t; ++m)
                            acc += xk * table.at(d, p, l, m) * xl * std::conj(frame.at(w, i - m));
                    }
                }
            }
            out.symbols[k][i] += cd(0.0, table.gamma) * acc;
        }
    }
    add_noise(out, noise);
    return out;
}

}  // namespace xpmcap
