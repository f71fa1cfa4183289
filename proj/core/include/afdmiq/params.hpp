// params.hpp - AFDM frame geometry and chirp-rate derivation.
#pragma once

#include <cstdint>
#include <optional>

namespace afdmiq {

/**
 * Frame parameters for one AFDM carrier configuration.
 *
 * The first chirp rate c1 controls the delay-Doppler to DAFT-bin mapping;
 * the full-diversity rule ties it to the worst-case integer Doppler plus a
 * guard band. c2 is a free phase shaping term. c1 = c2 = 0 degenerates to
 * plain OFDM (the DAFT becomes the unitary DFT), which is how the OFDM
 * reference mode is realized throughout.
 */
struct AfdmParams {
    int n = 0;               // subcarriers per frame
    double c1 = 0.0;         // first chirp rate
    double c2 = 0.0;         // second chirp rate
    int nu_max = 0;          // max integer Doppler shift (bins)
    int tau_max = 0;         // max path delay (samples)
    int zeta_nu = 0;         // fractional-Doppler guard (bins)
    int cpp_len = 0;         // chirp-periodic prefix length (samples)

    /// Throws std::invalid_argument when any structural invariant fails.
    void validate() const;

    /// True when n is a power of two (fast transform path available).
    [[nodiscard]] bool pow2() const { return n > 0 && (n & (n - 1)) == 0; }
};

/**
 * Chirp rates for a doubly selective channel budget:
 *   c1 = (2*(nu_max + zeta_nu) + 1) / (2*N),  c2 = 1/(2*N^2) by default.
 * A c2 override must lie in [0, 1/(2N)).
 */
struct ChirpRates {
    double c1;
    double c2;
};
ChirpRates derive_chirp_rates(int n, int nu_max, int zeta_nu,
                              std::optional<double> c2_override = {});

/// Rule-derived AFDM configuration; cpp_len defaults to tau_max.
AfdmParams make_afdm_params(int n, int nu_max, int tau_max, int zeta_nu,
                            std::optional<double> c2_override = {},
                            std::optional<int> cpp_len = {});

/// OFDM reference mode: c1 = c2 = 0 with a plain cyclic prefix.
AfdmParams make_ofdm_params(int n, int tau_max,
                            std::optional<int> cpp_len = {});

}  // namespace afdmiq
