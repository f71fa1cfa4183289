// transform.hpp - Discrete affine Fourier transform (DAFT) and the
// chirp-periodic prefix.
//
// The DAFT matrix is A = L_c2 * F * L_c1 with L_c = diag(exp(-j*2*pi*c*n^2))
// and F the unitary DFT. Modulation maps DAFT-domain symbols x to time
// samples s = A^H x; demodulation applies A. For power-of-two N both
// directions run as chirp multiply, (I)FFT, chirp multiply in O(N log N);
// otherwise the explicit matrix product is used. Both paths agree to 1e-10.
#pragma once

#include <memory>

#include "afdmiq/params.hpp"
#include "afdmiq/types.hpp"

namespace afdmiq::detail { class Radix2Fft; }

namespace afdmiq {

/**
 * Reusable DAFT plan for one AfdmParams configuration.
 *
 * Construction precomputes the chirp phase vectors and (for power-of-two N)
 * the FFT twiddles. All methods are const and the plan is safe to share
 * across threads; the lazily built dense matrix is guarded internally.
 */
class DaftTransform {
  public:
    explicit DaftTransform(const AfdmParams& params);
    ~DaftTransform();
    DaftTransform(DaftTransform&&) noexcept;
    DaftTransform& operator=(DaftTransform&&) noexcept;

    [[nodiscard]] const AfdmParams& params() const { return params_; }

    /// DAFT-domain symbols -> time samples (s = A^H x).
    [[nodiscard]] CVec modulate(const CVec& x) const;

    /// Time samples -> DAFT-domain symbols (y = A r).
    [[nodiscard]] CVec demodulate(const CVec& r) const;

    /// Dense unitary DAFT matrix A (built once on first use, then cached).
    [[nodiscard]] const CMat& matrix() const;

    /// A applied to every column of m, i.e. A * m, via the fast path.
    [[nodiscard]] CMat demodulate_columns(const CMat& m) const;

  private:
    AfdmParams params_;
    CVec chirp1_;  // exp(-j*2*pi*c1*n^2)
    CVec chirp2_;  // exp(-j*2*pi*c2*m^2)
    std::unique_ptr<detail::Radix2Fft> fft_;  // null when N is not a power of two
    struct MatrixCache;
    std::unique_ptr<MatrixCache> cache_;
};

/// One-shot helpers; prefer a shared DaftTransform in hot loops.
CVec idaft(const CVec& x, const AfdmParams& params);
CVec daft(const CVec& r, const AfdmParams& params);

/// Dense DAFT matrix for the given configuration.
CMat daft_matrix(const AfdmParams& params);

/**
 * Prepend the chirp-periodic prefix:
 *   s[n] = s[N+n] * exp(-j*2*pi*c1*(N^2 + 2*N*n)),  n = -cpp_len .. -1.
 * With the rule-derived c1 (odd numerator over 2N) and even N every prefix
 * phase equals 1 and this is a plain cyclic prefix.
 */
TimeSignal add_cpp(const TimeSignal& frame, const AfdmParams& params);

/// Drop the prefix samples again.
TimeSignal remove_cpp(const TimeSignal& frame, const AfdmParams& params);

}  // namespace afdmiq
