// fft.hpp - Internal radix-2 FFT used by the fast DAFT path.
//
// Self-contained and stateless after construction so transform plans can be
// shared across worker threads; results are bit-reproducible for a given
// binary, which the deterministic-output contract relies on.
#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace afdmiq::detail {

class Radix2Fft {
  public:
    explicit Radix2Fft(int n) : n_(n) {
        if (n < 1 || (n & (n - 1)) != 0)
            throw std::invalid_argument("Radix2Fft: size must be a power of two");
        twiddle_.resize(static_cast<size_t>(n) / 2);
        for (size_t k = 0; k < twiddle_.size(); ++k) {
            const double a = -2.0 * pi_ * static_cast<double>(k) / n;
            twiddle_[k] = {std::cos(a), std::sin(a)};
        }
        rev_.resize(static_cast<size_t>(n));
        int log2n = 0;
        while ((1 << log2n) < n) ++log2n;
        for (int i = 0; i < n; ++i) {
            unsigned r = 0;
            for (int b = 0; b < log2n; ++b)
                if (i & (1 << b)) r |= 1u << (log2n - 1 - b);
            rev_[static_cast<size_t>(i)] = r;
        }
    }

    /// In-place DFT without scaling; dir = -1 forward, +1 inverse.
    void run(std::complex<double>* x, int dir) const {
        const int n = n_;
        for (int i = 0; i < n; ++i) {
            const unsigned j = rev_[static_cast<size_t>(i)];
            if (static_cast<unsigned>(i) < j) std::swap(x[i], x[j]);
        }
        for (int len = 2; len <= n; len <<= 1) {
            const int half = len >> 1;
            const int stride = n / len;
            for (int base = 0; base < n; base += len) {
                for (int k = 0; k < half; ++k) {
                    std::complex<double> w = twiddle_[static_cast<size_t>(k * stride)];
                    if (dir > 0) w = std::conj(w);
                    const std::complex<double> u = x[base + k];
                    const std::complex<double> t = w * x[base + k + half];
                    x[base + k] = u + t;
                    x[base + k + half] = u - t;
                }
            }
        }
    }

    [[nodiscard]] int size() const { return n_; }

  private:
    static constexpr double pi_ = 3.141592653589793238462643383279502884;
    int n_;
    std::vector<std::complex<double>> twiddle_;
    std::vector<unsigned> rev_;
};

}  // namespace afdmiq::detail
