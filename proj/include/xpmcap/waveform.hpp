// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "xpmcap/fft.hpp"

#include <cstddef>
#include <stdexcept>

namespace xpmcap {

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Uniformly sampled complex baseband signal. Sample j sits at t0 + j*dt.
struct SampledWaveform {
    cvec samples;
    double dt = 0.0;
    double t0 = 0.0;

    std::size_t size() const { return samples.size(); }
    double energy() const;  // sum |x|^2 dt
};

// Root-raised-cosine amplitude response at frequency f [Hz] for unit
// passband gain. Bins exactly on a discontinuity (rolloff 0) get 0.5.
double rrc_response(double f, double symbol_rate, double rolloff);

// Unit-energy RRC pulse centered in a window of `window_symbols` symbols,
// built in the frequency domain. Throws NumericalError if more than 1e-6 of
// the energy falls in the outer 1/64 of the window on either side.
SampledWaveform rrc_pulse(double rolloff, double symbol_period, int samples_per_symbol, int window_symbols);

// Linear propagation over z km: multiply the spectrum by
// exp(-j beta2/2 omega^2 z), the operator of the NLSE sign convention used
// throughout (see README). beta2 in s^2/km. Throws NumericalError when
// more than 1e-6 of the energy reaches the outer 1/64 of the window.
SampledWaveform propagate_dispersion(const SampledWaveform& pulse, double z_km, double beta2);

// Fraction of the energy in the outer 1/64 of the window (both sides).
double edge_energy_fraction(const SampledWaveform& w);

// Energy-weighted RMS width in seconds.
double rms_width(const SampledWaveform& w);

}  // namespace xpmcap
