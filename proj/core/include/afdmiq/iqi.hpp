// iqi.hpp - Transmit/receive IQ imbalance and its noise statistics.
//
// A mismatched quadrature pair turns a baseband signal s into
// direct*s + image*conj(s). The direct/image gains follow from the
// amplitude mismatch alpha and phase mismatch theta:
//   direct = cos(theta/2) + j*alpha*sin(theta/2)
//   image  = alpha*cos(theta/2) - j*sin(theta/2)
// |direct|^2 + |image|^2 = 1 + alpha^2, and physical settings keep
// |direct| > |image| so the map stays invertible.
#pragma once

#include "afdmiq/rng.hpp"
#include "afdmiq/transform.hpp"
#include "afdmiq/types.hpp"

namespace afdmiq {

/// How an amplitude-imbalance figure in dB maps to alpha.
/// power_10log:     alpha = 10^(db/10) - 1   (printed definition)
/// amplitude_20log: alpha = 10^(db/20) - 1   (amplitude-ratio reading; this
/// is the convention consistent with the reference waveform-loss and
/// compensation-overlay behavior reproduced by the acceptance suite)
enum class AmpDbConvention { power_10log, amplitude_20log };

struct IqImbalance {
    cplx direct{1.0, 0.0};  // gain on the wanted signal
    cplx image{0.0, 0.0};   // gain on the conjugate image
    double amp_mismatch = 0.0;     // alpha
    double phase_mismatch = 0.0;   // theta, radians

    [[nodiscard]] bool is_ideal() const;
    /// |direct|^2 - |image|^2, the widely-linear inversion determinant.
    [[nodiscard]] double invert_gap() const;
};

/// Build from dB/degree settings; throws when the map is not invertible
/// (|direct| <= |image|) or inputs are not finite.
IqImbalance iqi_from_db(double amp_db, double phase_deg,
                        AmpDbConvention convention = AmpDbConvention::power_10log);

/// Element-wise direct*s + image*conj(s).
CVec apply_iqi(const CVec& s, const IqImbalance& iqi);
TimeSignal apply_iqi(const TimeSignal& s, const IqImbalance& iqi);

/// Add circularly symmetric white Gaussian noise of total variance sigma2.
CVec add_awgn(const CVec& s, double sigma2, Rng& rng);

/// Second-order statistics of receive-imbalanced noise in the DAFT domain.
struct NoiseStats {
    CMat cov;      // (|direct|^2+|image|^2) * sigma2 * I
    CMat pcov;     // 2 * direct * image * sigma2 * A * A^T
    double sigma2_eff = 0.0;  // diagonal of cov
};
NoiseStats daft_noise_stats(const IqImbalance& rx_iqi, double sigma2,
                            const DaftTransform& daft);

/**
 * The four DAFT-domain components of a noiseless joint-IQI transmission:
 * attenuated wanted signal, conjugate-image interference, and the two
 * channel-conjugated leakage terms introduced by the receive imbalance.
 * Their sum equals the end-to-end pipeline output.
 */
struct InterferenceTerms {
    CVec wanted;           // direct_rx*direct_tx * A H A^H x
    CVec tx_image;         // direct_rx*image_tx * A H A^T conj(x)
    CVec rx_conj_image;    // image_rx*conj(direct_tx) * A conj(H) A^T conj(x)
    CVec rx_conj_wanted;   // image_rx*conj(image_tx) * A conj(H) A^H x
    [[nodiscard]] CVec sum() const;
};

struct ChannelRealization;

InterferenceTerms decompose_interference(const CVec& x, const ChannelRealization& chan,
                                         const IqImbalance& tx_iqi,
                                         const IqImbalance& rx_iqi,
                                         const DaftTransform& daft);

}  // namespace afdmiq
