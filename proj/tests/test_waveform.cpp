#include "support.hpp"
#include "xpmcap/waveform.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace xpmcap;

namespace {

constexpr double kT = 1.0 / 32e9;
constexpr double kBeta2 = -21.7e-24;  // s^2/km

// O(N^2) transform with the FFT's sign convention.
cvec direct_dft(const cvec& x, int sign) {
    const std::size_t n = x.size();
    cvec out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cd acc{};
        for (std::size_t j = 0; j < n; ++j)
            acc += x[j] * std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / n);
        out[k] = acc;
    }
    return out;
}

cvec direct_dispersion(const SampledWaveform& w, double z, double beta2) {
    const std::size_t n = w.size();
    cvec spec = direct_dft(w.samples, -1);
    for (std::size_t k = 0; k < n; ++k) {
        const double om = bin_omega(k, n, w.dt);
        spec[k] *= std::polar(1.0, -0.5 * beta2 * om * om * z);
    }
    cvec out = direct_dft(spec, +1);
    for (auto& v : out) v /= static_cast<double>(n);
    return out;
}

}  // namespace

TEST_SUITE("waveform") {
    TEST_CASE("pulse has unit energy for the supported roll-offs") {
        for (double r : {0.0, 0.1, 0.5, 1.0}) {
            CAPTURE(r);
            const auto g = rrc_pulse(r, kT, 8, r == 0.0 ? 16384 : 512);
            CHECK(std::abs(g.energy() - 1.0) < 1e-9);
        }
    }

    TEST_CASE("sinc pulse vanishes at nonzero symbol lags") {
        const auto g = rrc_pulse(0.0, kT, 8, 16384);
        const std::size_t c = g.size() / 2;
        const double peak = std::abs(g.samples[c]);
        for (int k = 1; k < 200; ++k) {
            CAPTURE(k);
            CHECK(std::abs(g.samples[c + 8 * k]) < 1e-6 * peak);
            CHECK(std::abs(g.samples[c - 8 * k]) < 1e-6 * peak);
        }
    }

    TEST_CASE("spectrum is flat in the passband and zero past the roll-off") {
        const double r = 0.1;
        auto g = rrc_pulse(r, kT, 16, 512);
        Fft fft(g.size());
        cvec spec = g.samples;
        fft.forward(spec);
        double ref = -1.0;
        for (std::size_t k = 0; k < spec.size(); ++k) {
            const double f = std::abs(bin_omega(k, spec.size(), g.dt)) / (2.0 * std::numbers::pi);
            const double mag = std::abs(spec[k]);
            if (f <= (1.0 - r) / (2.0 * kT)) {
                if (ref < 0) ref = mag;
                CHECK(mag == doctest::Approx(ref).epsilon(1e-9));
            } else if (f > (1.0 + r) / (2.0 * kT)) {
                CHECK(mag < 1e-12 * ref);
            }
        }
    }

    TEST_CASE("band edge of the brick-wall gets half weight") {
        CHECK(rrc_response(16e9, 32e9, 0.0) == 0.5);
        CHECK(rrc_response(15.9e9, 32e9, 0.0) == 1.0);
        CHECK(rrc_response(16.1e9, 32e9, 0.0) == 0.0);
        CHECK(rrc_response(16e9, 32e9, 0.1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    }

    TEST_CASE("short windows are rejected") {
        CHECK_THROWS_AS(rrc_pulse(0.1, kT, 16, 16), NumericalError);
    }

    TEST_CASE("zero distance is the identity and dispersion keeps energy") {
        const auto g = rrc_pulse(0.1, kT, 16, 512);
        const auto same = propagate_dispersion(g, 0.0, kBeta2);
        CHECK(same.samples == g.samples);
        for (double z : {1.0, 50.0, 250.0}) {
            const auto d = propagate_dispersion(g, z, kBeta2);
            CHECK(std::abs(d.energy() - g.energy()) < 1e-9);
        }
    }

    TEST_CASE("FFT dispersion equals direct DFT on a small grid") {
        const auto g = rrc_pulse(0.5, kT, 4, 64);  // 256 points
        const auto fast = propagate_dispersion(g, 5.0, kBeta2);
        const cvec slow = direct_dispersion(g, 5.0, kBeta2);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < slow.size(); ++i) {
            num += std::norm(fast.samples[i] - slow[i]);
            den += std::norm(slow[i]);
        }
        CHECK(std::sqrt(num / den) < 1e-9);
    }

    TEST_CASE("RMS broadening over the span matches direct DFT") {
        const auto g = rrc_pulse(0.1, kT, 16, 256);  // 4096 points
        const auto fast = propagate_dispersion(g, 250.0, kBeta2);
        SampledWaveform slow = g;
        slow.samples = direct_dispersion(g, 250.0, kBeta2);
        const double w0 = rms_width(g), wf = rms_width(fast), ws = rms_width(slow);
        CHECK(wf > 3.0 * w0);  // hundreds of ps of spreading
        CHECK(std::abs(wf - ws) / ws < 1e-6);
    }

    TEST_CASE("dispersion that reaches the window edge is an error") {
        const auto g = rrc_pulse(0.1, kT, 16, 128);  // about 38 symbols of spread per 250 km
        CHECK_NOTHROW(propagate_dispersion(g, 10.0, kBeta2));
        CHECK_THROWS_AS(propagate_dispersion(g, 1500.0, kBeta2), NumericalError);
    }
}
