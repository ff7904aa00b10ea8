// SPDX-License-Identifier: Apache-2.0
// AVX2+FMA kernels. Complex values are interleaved re/im, two per register.
#include "xpmcap/simd.hpp"

#include <immintrin.h>

namespace xpmcap::simd {

const KernelTable& scalar_kernels();

namespace {

// sin and cos of four doubles. Reduction by pi/4 in three parts
// (Cody-Waite), Cephes minimax polynomials on [-pi/4, pi/4].
inline __m256d sin_poly(__m256d z, __m256d zz) {
    __m256d ps = _mm256_set1_pd(1.58962301576546568060E-10);
    ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-2.50507477628578072866E-8));
    ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(2.75573136213857245213E-6));
    ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-1.98412698295895385996E-4));
    ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(8.33333333332211858878E-3));
    ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-1.66666666666666307295E-1));
    return _mm256_fmadd_pd(_mm256_mul_pd(z, zz), ps, z);
}

inline __m256d cos_poly(__m256d zz) {
    __m256d pc = _mm256_set1_pd(-1.13585365213876817300E-11);
    pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(2.08757008419747316778E-9));
    pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(-2.75573141792967388112E-7));
    pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(2.48015872888517045348E-5));
    pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(-1.38888888888730564116E-3));
    pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(4.16666666666665929218E-2));
    const __m256d zz2 = _mm256_mul_pd(zz, zz);
    return _mm256_fmadd_pd(zz2, pc, _mm256_fnmadd_pd(_mm256_set1_pd(0.5), zz, _mm256_set1_pd(1.0)));
}

inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    const __m256d sign_x = _mm256_and_pd(x, sign_mask);
    const __m256d ax = _mm256_andnot_pd(sign_mask, x);

    // Below pi/4 the reduction is the identity (octant 0), and both
    // polynomials have exact odd/even symmetry, so skipping it gives the
    // same bits. Split-step Kerr phases are almost always this small.
    if (_mm256_movemask_pd(_mm256_cmp_pd(ax, _mm256_set1_pd(0.78), _CMP_GT_OQ)) == 0) {
        const __m256d zz = _mm256_mul_pd(ax, ax);
        s_out = _mm256_xor_pd(sin_poly(ax, zz), sign_x);
        c_out = cos_poly(zz);
        return;
    }

    __m256d y = _mm256_floor_pd(_mm256_mul_pd(ax, _mm256_set1_pd(1.27323954473516268615)));
    // make y even
    const __m256d half_y = _mm256_floor_pd(_mm256_mul_pd(y, _mm256_set1_pd(0.5)));
    const __m256d odd = _mm256_sub_pd(y, _mm256_add_pd(half_y, half_y));
    y = _mm256_add_pd(y, odd);
    const __m256d oct = _mm256_sub_pd(y, _mm256_mul_pd(_mm256_set1_pd(8.0),
                                                       _mm256_floor_pd(_mm256_mul_pd(y, _mm256_set1_pd(0.125)))));

    __m256d z = _mm256_fnmadd_pd(y, _mm256_set1_pd(7.85398125648498535156E-1), ax);
    z = _mm256_fnmadd_pd(y, _mm256_set1_pd(3.77489470793079817668E-8), z);
    z = _mm256_fnmadd_pd(y, _mm256_set1_pd(2.69515142907905952645E-15), z);
    const __m256d zz = _mm256_mul_pd(z, z);
    const __m256d sp = sin_poly(z, zz);
    const __m256d cp = cos_poly(zz);

    // octant 2 and 6 swap the polynomials
    const __m256d swap = _mm256_or_pd(_mm256_cmp_pd(oct, _mm256_set1_pd(2.0), _CMP_EQ_OQ),
                                      _mm256_cmp_pd(oct, _mm256_set1_pd(6.0), _CMP_EQ_OQ));
    __m256d s = _mm256_blendv_pd(sp, cp, swap);
    __m256d c = _mm256_blendv_pd(cp, sp, swap);

    const __m256d neg_s = _mm256_cmp_pd(oct, _mm256_set1_pd(3.0), _CMP_GT_OQ);
    const __m256d neg_c = _mm256_or_pd(_mm256_cmp_pd(oct, _mm256_set1_pd(2.0), _CMP_EQ_OQ),
                                       _mm256_cmp_pd(oct, _mm256_set1_pd(4.0), _CMP_EQ_OQ));
    s = _mm256_xor_pd(s, _mm256_and_pd(neg_s, sign_mask));
    s = _mm256_xor_pd(s, sign_x);
    c = _mm256_xor_pd(c, _mm256_and_pd(neg_c, sign_mask));
    s_out = s;
    c_out = c;
}

// [ar, ai] * [hr, hi]
inline __m256d cmul2(__m256d a, __m256d h) {
    const __m256d hr = _mm256_movedup_pd(h);
    const __m256d hi = _mm256_permute_pd(h, 0xF);
    const __m256d as = _mm256_permute_pd(a, 0x5);
    return _mm256_fmaddsub_pd(a, hr, _mm256_mul_pd(as, hi));
}

// conj(a) * b
inline __m256d conj_mul2(__m256d a, __m256d b) {
    const __m256d ar = _mm256_movedup_pd(a);
    const __m256d ai = _mm256_permute_pd(a, 0xF);
    const __m256d bs = _mm256_permute_pd(b, 0x5);
    return _mm256_fmsubadd_pd(ar, b, _mm256_mul_pd(ai, bs));
}

inline cd fold(__m256d acc) {
    alignas(32) double t[4];
    _mm256_store_pd(t, acc);
    return {t[0] + t[2], t[1] + t[3]};
}

inline double* dp(cd* p) { return reinterpret_cast<double*>(p); }
inline const double* dp(const cd* p) { return reinterpret_cast<const double*>(p); }

void cmul(cd* x, const cd* h, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d a = _mm256_loadu_pd(dp(x + i));
        _mm256_storeu_pd(dp(x + i), cmul2(a, _mm256_loadu_pd(dp(h + i))));
    }
    if (i < n) scalar_kernels().cmul(x + i, h + i, n - i);
}

void kerr_rotate(cd* x, std::size_t n, double coeff) {
    const __m256d k = _mm256_set1_pd(coeff);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(dp(x + i));
        const __m256d b = _mm256_loadu_pd(dp(x + i + 2));
        // [|x0|^2, |x2|^2, |x1|^2, |x3|^2]
        const __m256d p = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
        __m256d s, c;
        sincos4(_mm256_mul_pd(k, p), s, c);
        const __m256d ca = _mm256_unpacklo_pd(c, c), sa = _mm256_unpacklo_pd(s, s);
        const __m256d cb = _mm256_unpackhi_pd(c, c), sb = _mm256_unpackhi_pd(s, s);
        _mm256_storeu_pd(dp(x + i), _mm256_fmaddsub_pd(a, ca, _mm256_mul_pd(_mm256_permute_pd(a, 0x5), sa)));
        _mm256_storeu_pd(dp(x + i + 2), _mm256_fmaddsub_pd(b, cb, _mm256_mul_pd(_mm256_permute_pd(b, 0x5), sb)));
    }
    if (i < n) scalar_kernels().kerr_rotate(x + i, n - i, coeff);
}

double energy(const cd* x, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d u = _mm256_loadu_pd(dp(x + i));
        const __m256d v = _mm256_loadu_pd(dp(x + i + 2));
        a0 = _mm256_fmadd_pd(u, u, a0);
        a1 = _mm256_fmadd_pd(v, v, a1);
    }
    alignas(32) double t[4];
    _mm256_store_pd(t, _mm256_add_pd(a0, a1));
    double acc = (t[0] + t[1]) + (t[2] + t[3]);
    if (i < n) acc += scalar_kernels().energy(x + i, n - i);
    return acc;
}

void conj_mul(const cd* a, const cd* b, cd* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        _mm256_storeu_pd(dp(out + i), conj_mul2(_mm256_loadu_pd(dp(a + i)), _mm256_loadu_pd(dp(b + i))));
    if (i < n) scalar_kernels().conj_mul(a + i, b + i, out + i, n - i);
}

cd cdot(const cd* a, const cd* b, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        a0 = _mm256_add_pd(a0, cmul2(_mm256_loadu_pd(dp(a + i)), _mm256_loadu_pd(dp(b + i))));
        a1 = _mm256_add_pd(a1, cmul2(_mm256_loadu_pd(dp(a + i + 2)), _mm256_loadu_pd(dp(b + i + 2))));
    }
    cd acc = fold(_mm256_add_pd(a0, a1));
    if (i < n) acc += scalar_kernels().cdot(a + i, b + i, n - i);
    return acc;
}

cd quad_sum(const cd* a, const cd* b, const cd* c, const cd* d, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d u = conj_mul2(_mm256_loadu_pd(dp(a + i)), _mm256_loadu_pd(dp(b + i)));
        const __m256d v = conj_mul2(_mm256_loadu_pd(dp(c + i)), _mm256_loadu_pd(dp(d + i)));
        acc = _mm256_add_pd(acc, cmul2(u, v));
    }
    cd out = fold(acc);
    if (i < n) out += scalar_kernels().quad_sum(a + i, b + i, c + i, d + i, n - i);
    return out;
}

void lag_sum(const double* power, std::size_t n, const double* taps, int memory, double* out) {
    const long len = static_cast<long>(n);
    const long lo = memory, hi = len - memory;  // i in [lo, hi) never touches the boundary
    if (hi - lo < 4) {
        scalar_kernels().lag_sum(power, n, taps, memory, out);
        return;
    }
    auto edge = [&](long i) {
        double acc = 0.0;
        for (int m = -memory; m <= memory; ++m) {
            const long j = i - m;
            if (j >= 0 && j < len) acc += taps[m + memory] * power[j];
        }
        out[i] += acc;
    };
    for (long i = 0; i < lo; ++i) edge(i);
    long i = lo;
    for (; i + 4 <= hi; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (int m = -memory; m <= memory; ++m)
            acc = _mm256_fmadd_pd(_mm256_set1_pd(taps[m + memory]), _mm256_loadu_pd(power + i - m), acc);
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), acc));
    }
    for (; i < len; ++i) edge(i);
}

constexpr KernelTable kTable{"avx2", cmul, kerr_rotate, energy, conj_mul, cdot, quad_sum, lag_sum};

}  // namespace

const KernelTable* avx2_table_impl() { return &kTable; }

}  // namespace xpmcap::simd
