// detect.hpp - Frame detectors: linear MMSE, exhaustive ML, and the
// widely linear MMSE baseline on the augmented [y; conj(y)] system.
#pragma once

#include <cstdint>
#include <vector>

#include "afdmiq/channel.hpp"
#include "afdmiq/constellation.hpp"
#include "afdmiq/iqi.hpp"
#include "afdmiq/types.hpp"

namespace afdmiq {

struct DetectedFrame {
    CVec soft;                       // pre-decision symbol estimates
    Eigen::VectorXi hard;            // decided point indices
    std::vector<std::uint8_t> bits;  // decided bits, one per byte
};

/**
 * Widely linear signal model y = direct*x + mirror*conj(x) + noise.
 * With no IQI, direct is the DAFT-domain channel and mirror is zero.
 */
struct WidelyLinearModel {
    CMat direct;
    CMat mirror;
};

/// Full joint-IQI model (both gains of both sides enter).
WidelyLinearModel build_wl_model(const ChannelRealization& chan,
                                 const DaftTransform& daft,
                                 const IqImbalance& tx_iqi,
                                 const IqImbalance& rx_iqi);

/// Receive-side-only model: the transmit side is assumed ideal. This is the
/// model behind the widely linear MMSE baseline, which by design exploits
/// only the impropriety introduced at the receiver.
WidelyLinearModel build_wl_model_rx_only(const ChannelRealization& chan,
                                         const DaftTransform& daft,
                                         const IqImbalance& rx_iqi);

/**
 * Linear MMSE: soft = H^H (H H^H + sigma2 I)^{-1} y, then per-symbol hard
 * decisions. Throws std::runtime_error when the regularized Gram matrix
 * cannot be factorized.
 */
DetectedFrame mmse_detect(const CVec& y, const CMat& h_eff, double sigma2,
                          const Constellation& c);

/**
 * Exhaustive maximum likelihood over the widely linear model: minimizes
 * ||y - direct*x - mirror*conj(x)||^2 over all constellation vectors,
 * enumerated in mixed-radix Gray order with O(N) incremental updates.
 * Guarded to |C|^N <= 2^20 hypotheses.
 */
DetectedFrame ml_detect(const CVec& y, const WidelyLinearModel& model,
                        const Constellation& c);

/**
 * Widely linear MMSE on z = [y; conj(y)] with the given model and the
 * improper noise statistics; returns the estimate of x (top half).
 * Reduces to mmse_detect when the model has no mirror and the noise no
 * pseudo-covariance.
 */
DetectedFrame wl_mmse_detect(const CVec& y, const WidelyLinearModel& model,
                             const NoiseStats& noise, const Constellation& c);

}  // namespace afdmiq
