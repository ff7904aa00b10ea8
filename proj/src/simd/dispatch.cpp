// SPDX-License-Identifier: Apache-2.0
#include "xpmcap/simd.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace xpmcap::simd {

#ifdef XPMCAP_HAVE_AVX2
const KernelTable* avx2_table_impl();
#endif

const KernelTable* avx2_kernels() {
#ifdef XPMCAP_HAVE_AVX2
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return avx2_table_impl();
#endif
    return nullptr;
}

namespace {

const KernelTable* select() {
    const char* env = std::getenv("XPMCAP_SIMD");
    const std::string want = env ? env : "";
    if (want == "scalar") return &scalar_kernels();
    const KernelTable* fast = avx2_kernels();
    if (want == "avx2" && !fast) throw std::runtime_error("XPMCAP_SIMD=avx2 requested but AVX2/FMA unavailable");
    if (!want.empty() && want != "avx2") throw std::runtime_error("XPMCAP_SIMD must be 'scalar' or 'avx2'");
    return fast ? fast : &scalar_kernels();
}

const KernelTable*& slot() {
    static const KernelTable* table = select();
    return table;
}

}  // namespace

const KernelTable& active() { return *slot(); }

void force(const KernelTable& table) { slot() = &table; }

}  // namespace xpmcap::simd
