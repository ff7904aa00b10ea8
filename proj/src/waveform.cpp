// SPDX-License-Identifier: Apache-2.0
#include "xpmcap/waveform.hpp"

#include "xpmcap/simd.hpp"

#include <cmath>
#include <numbers>

namespace xpmcap {

double SampledWaveform::energy() const { return simd::active().energy(samples.data(), samples.size()) * dt; }

double rrc_response(double f, double symbol_rate, double rolloff) {
    const double af = std::abs(f);
    const double f1 = (1.0 - rolloff) * symbol_rate / 2.0;
    const double f2 = (1.0 + rolloff) * symbol_rate / 2.0;
    if (rolloff == 0.0) {
        const double tol = 1e-9 * f1;
        if (af < f1 - tol) return 1.0;
        if (af <= f1 + tol) return 0.5;
        return 0.0;
    }
    if (af <= f1) return 1.0;
    if (af >= f2) return 0.0;
    // sqrt of the raised-cosine transition
    return std::cos(std::numbers::pi / (2.0 * rolloff * symbol_rate) * (af - f1));
}

SampledWaveform rrc_pulse(double rolloff, double symbol_period, int samples_per_symbol, int window_symbols) {
    if (!(rolloff >= 0.0 && rolloff <= 1.0)) throw std::invalid_argument("rrc_pulse: rolloff must be in [0,1]");
    if (samples_per_symbol < 2 || (samples_per_symbol & (samples_per_symbol - 1)))
        throw std::invalid_argument("rrc_pulse: samples_per_symbol must be a power of two >= 2");
    if (window_symbols < 4) throw std::invalid_argument("rrc_pulse: window too small");
    if (!(symbol_period > 0.0)) throw std::invalid_argument("rrc_pulse: symbol_period must be > 0");

    const std::size_t n = static_cast<std::size_t>(samples_per_symbol) * window_symbols;
    const double dt = symbol_period / samples_per_symbol;
    const double rs = 1.0 / symbol_period;

    cvec spec(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = bin_omega(k, n, dt) / (2.0 * std::numbers::pi);
        // Centre the pulse at index n/2: a delay of n/2 samples.
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        spec[k] = rrc_response(f, rs, rolloff) * sign;
    }
    Fft fft(n);
    fft.inverse(spec);

    SampledWaveform w{std::move(spec), dt, -static_cast<double>(n / 2) * dt};
    const double e = w.energy();
    const double scale = 1.0 / std::sqrt(e);
    for (auto& s : w.samples) s *= scale;

    const double leak = edge_energy_fraction(w);
    if (leak > 1e-6) throw NumericalError("rrc_pulse: window too short, edge energy fraction " + std::to_string(leak));
    return w;
}

SampledWaveform propagate_dispersion(const SampledWaveform& pulse, double z_km, double beta2) {
    if (!std::isfinite(z_km) || !std::isfinite(beta2)) throw std::invalid_argument("propagate_dispersion: non-finite input");
    SampledWaveform out = pulse;
    if (z_km == 0.0 || beta2 == 0.0) return out;
    const std::size_t n = out.size();
    Fft fft(n);
    fft.forward(out.samples);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = bin_omega(k, n, out.dt);
        out.samples[k] *= std::polar(1.0, -0.5 * beta2 * w * w * z_km);
    }
    fft.inverse(out.samples);
    // Periodic grid: energy reaching the edges has wrapped around.
    const double leak = edge_energy_fraction(out);
    if (leak > 1e-6)
        throw NumericalError("propagate_dispersion: dispersed pulse reaches the window edge (fraction " + std::to_string(leak) + ")");
    return out;
}

double edge_energy_fraction(const SampledWaveform& w) {
    const std::size_t n = w.size();
    const std::size_t edge = n / 64;
    const auto& k = simd::active();
    const double total = k.energy(w.samples.data(), n);
    if (total == 0.0) return 0.0;
    const double outer = k.energy(w.samples.data(), edge) + k.energy(w.samples.data() + n - edge, edge);
    return outer / total;
}

double rms_width(const SampledWaveform& w) {
    double e = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double t = w.t0 + static_cast<double>(j) * w.dt;
        const double p = std::norm(w.samples[j]);
        e += p;
        m1 += p * t;
        m2 += p * t * t;
    }
    const double mean = m1 / e;
    return std::sqrt(std::max(0.0, m2 / e - mean * mean));
}

}  // namespace xpmcap
