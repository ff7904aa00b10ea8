// SPDX-License-Identifier: Apache-2.0
#include "xpmcap/simd.hpp"

#include <cmath>

namespace xpmcap::simd {
namespace {

void cmul(cd* x, const cd* h, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double a = x[i].real(), b = x[i].imag();
        const double c = h[i].real(), d = h[i].imag();
        x[i] = cd(a * c - b * d, a * d + b * c);
    }
}

void kerr_rotate(cd* x, std::size_t n, double coeff) {
    for (std::size_t i = 0; i < n; ++i) {
        const double a = x[i].real(), b = x[i].imag();
        const double phi = coeff * (a * a + b * b);
        const double s = std::sin(phi), c = std::cos(phi);
        x[i] = cd(a * c - b * s, a * s + b * c);
    }
}

double energy(const cd* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return acc;
}

void conj_mul(const cd* a, const cd* b, cd* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = cd(ar * br + ai * bi, ar * bi - ai * br);
    }
}

cd cdot(const cd* a, const cd* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    }
    return {re, im};
}

cd quad_sum(const cd* a, const cd* b, const cd* c, const cd* d, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cd u = std::conj(a[i]) * b[i];
        const cd v = std::conj(c[i]) * d[i];
        re += u.real() * v.real() - u.imag() * v.imag();
        im += u.real() * v.imag() + u.imag() * v.real();
    }
    return {re, im};
}

void lag_sum(const double* power, std::size_t n, const double* taps, int memory, double* out) {
    const long len = static_cast<long>(n);
    for (long i = 0; i < len; ++i) {
        double acc = 0.0;
        for (int m = -memory; m <= memory; ++m) {
            const long j = i - m;
            if (j >= 0 && j < len) acc += taps[m + memory] * power[j];
        }
        out[i] += acc;
    }
}

constexpr KernelTable kTable{"scalar", cmul, kerr_rotate, energy, conj_mul, cdot, quad_sum, lag_sum};

}  // namespace

const KernelTable& scalar_kernels() { return kTable; }

}  // namespace xpmcap::simd
