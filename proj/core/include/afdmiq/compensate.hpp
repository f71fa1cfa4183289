// compensate.hpp - Widely linear IQ-imbalance correction at both link ends
// and the cascaded receiver that chains them around an inner detector.
#pragma once

#include "afdmiq/channel.hpp"
#include "afdmiq/constellation.hpp"
#include "afdmiq/detect.hpp"
#include "afdmiq/iqi.hpp"
#include "afdmiq/params.hpp"
#include "afdmiq/transform.hpp"
#include "afdmiq/types.hpp"

namespace afdmiq {

/**
 * Exact receive-side correction: recovers r from
 * r_bar = direct*r + image*conj(r) by inverting the 2x2 widely linear map,
 *   r = (conj(direct)*r_bar - image*conj(r_bar)) / (|direct|^2 - |image|^2).
 * Requires an invertible imbalance (|direct| > |image|).
 */
CVec compensate_rx(const CVec& r_bar, const IqImbalance& rx_iqi);
TimeSignal compensate_rx(const TimeSignal& r_bar, const IqImbalance& rx_iqi);

/**
 * Transmit-side correction applied after demodulation. The distortion in the
 * transform domain is x_bar = A (direct*A^H x + image*A^T conj(x)), which the
 * correct inverse undoes by going back to time domain, inverting the widely
 * linear map there, and re-demodulating:
 *   x = A (conj(direct)*u - image*conj(u)) / gap,  u = A^H x_bar.
 *
 * strict_transcription instead applies the map with A^T x_bar in place of
 * conj(A^H x_bar) (no conjugation of the chirp transform). The two coincide
 * only when A is real; for a chirp transform the strict variant does not
 * invert the distortion and is kept solely so tests can demonstrate that.
 */
CVec compensate_tx(const CVec& x_bar, const IqImbalance& tx_iqi,
                   const DaftTransform& daft, bool strict_transcription = false);

/// Which detector runs between the two compensation stages.
enum class InnerDetector { mmse, ml };

struct CompensationConfig {
    bool rx_enabled = true;
    bool tx_enabled = true;
    bool strict_transcription = false;
    InnerDetector inner = InnerDetector::mmse;
};

/**
 * Cascaded receiver: receive-side correction on the raw time-domain frame,
 * prefix removal, demodulation, inner detection against the IQI-free
 * effective channel, then transmit-side correction of the soft estimates and
 * a final hard decision. Inner MMSE uses the plain noise variance sigma2;
 * after exact receive-side correction the residual noise is white again up
 * to the (direct,image) scaling absorbed by the symbol-level decision.
 */
DetectedFrame cascaded_receive(const TimeSignal& r_bar,
                               const EffectiveChannel& eff,
                               const DaftTransform& daft,
                               const Constellation& c,
                               const IqImbalance& tx_iqi,
                               const IqImbalance& rx_iqi, double sigma2,
                               const CompensationConfig& cfg = {});

}  // namespace afdmiq
