// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace xpmcap {

using cd = std::complex<double>;
using cvec = std::vector<cd>;

// In-place complex FFT of fixed length backed by FFTW. Forward uses
// e^{-j 2 pi k n / N}; inverse includes the 1/N factor, so
// inverse(forward(x)) == x. Plans are FFTW_ESTIMATE: deterministic
// across processes, which the checkpoint resume relies on.
class Fft {
public:
    explicit Fft(std::size_t n);
    // Buffer from FFTW's allocator, SIMD aligned. Plans made by an
    // aligned Fft may only run on such buffers.
    class Buffer {
    public:
        explicit Buffer(std::size_t n);
        ~Buffer();
        Buffer(const Buffer&) = delete;
        Buffer& operator=(const Buffer&) = delete;
        cd* data() { return data_; }
        std::size_t size() const { return n_; }

    private:
        cd* data_;
        std::size_t n_;
    };
    enum class Layout { any, aligned };
    Fft(std::size_t n, Layout layout);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    std::size_t size() const { return n_; }
    void forward(cd* data) const;
    void inverse(cd* data) const;
    // Without the 1/N factor; callers fold it into their own scaling.
    void inverse_unscaled(cd* data) const;
    void forward(Buffer& b) const { forward(b.data()); }
    void inverse_unscaled(Buffer& b) const { inverse_unscaled(b.data()); }
    void forward(cvec& v) const { check(v); forward(v.data()); }
    void inverse(cvec& v) const { check(v); inverse(v.data()); }

private:
    void check(const cvec& v) const;
    std::size_t n_;
    struct Plans;
    std::unique_ptr<Plans> plans_;
};

// Angular frequency of DFT bin k for sample spacing dt, in numpy order.
double bin_omega(std::size_t k, std::size_t n, double dt);

}  // namespace xpmcap
