// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace xpmcap::simd {

using cd = std::complex<double>;

// Hot inner loops. Every entry has a scalar reference; the AVX2 table
// must agree with it to rounding (see tests/test_simd.cpp).
struct KernelTable {
    const char* name;
    // x[i] *= h[i]
    void (*cmul)(cd* x, const cd* h, std::size_t n);
    // x[i] *= exp(j * coeff * |x[i]|^2)
    void (*kerr_rotate)(cd* x, std::size_t n, double coeff);
    // sum |x[i]|^2
    double (*energy)(const cd* x, std::size_t n);
    // out[i] = conj(a[i]) * b[i]
    void (*conj_mul)(const cd* a, const cd* b, cd* out, std::size_t n);
    // sum a[i] * b[i]
    cd (*cdot)(const cd* a, const cd* b, std::size_t n);
    // sum conj(a) b conj(c) d
    cd (*quad_sum)(const cd* a, const cd* b, const cd* c, const cd* d, std::size_t n);
    // out[i] += sum_{m=-memory}^{memory} taps[m+memory] * power[i-m], zero outside [0,n)
    void (*lag_sum)(const double* power, std::size_t n, const double* taps, int memory, double* out);
};

const KernelTable& scalar_kernels();
// nullptr when the CPU or the build lacks AVX2+FMA.
const KernelTable* avx2_kernels();

// Selected once per process: XPMCAP_SIMD=scalar|avx2 overrides cpu detection.
const KernelTable& active();

// Test hook: force a table for the remainder of the process.
void force(const KernelTable& table);

}  // namespace xpmcap::simd
