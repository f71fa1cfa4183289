#include "afdmiq/compensate.hpp"

#include <stdexcept>
#include <string>

namespace afdmiq {
namespace {

void require_invertible(const IqImbalance& iqi, const char* where) {
    if (!(iqi.invert_gap() > 0.0)) {
        throw std::invalid_argument(std::string(where) +
                                    ": imbalance is not invertible");
    }
}

}  // namespace

CVec compensate_rx(const CVec& r_bar, const IqImbalance& rx_iqi) {
    require_invertible(rx_iqi, "compensate_rx");
    const double gap = rx_iqi.invert_gap();
    return (std::conj(rx_iqi.direct) * r_bar.array() -
            rx_iqi.image * r_bar.conjugate().array())
               .matrix() /
           gap;
}

TimeSignal compensate_rx(const TimeSignal& r_bar, const IqImbalance& rx_iqi) {
    TimeSignal out;
    out.samples = compensate_rx(r_bar.samples, rx_iqi);
    out.has_cpp = r_bar.has_cpp;
    return out;
}

CVec compensate_tx(const CVec& x_bar, const IqImbalance& tx_iqi,
                   const DaftTransform& daft, bool strict_transcription) {
    require_invertible(tx_iqi, "compensate_tx");
    const double gap = tx_iqi.invert_gap();
    const CVec u = daft.modulate(x_bar);  // A^H x_bar
    CVec mirrored;
    if (strict_transcription) {
        // A^T x_bar, computed as conj(A^H conj(x_bar)).
        mirrored = daft.modulate(x_bar.conjugate()).conjugate();
    } else {
        mirrored = u.conjugate();
    }
    const CVec corrected =
        (std::conj(tx_iqi.direct) * u.array() - tx_iqi.image * mirrored.array())
            .matrix() /
        gap;
    return daft.demodulate(corrected);
}

DetectedFrame cascaded_receive(const TimeSignal& r_bar,
                               const EffectiveChannel& eff,
                               const DaftTransform& daft,
                               const Constellation& c,
                               const IqImbalance& tx_iqi,
                               const IqImbalance& rx_iqi, double sigma2,
                               const CompensationConfig& cfg) {
    TimeSignal r = cfg.rx_enabled ? compensate_rx(r_bar, rx_iqi) : r_bar;
    const TimeSignal trimmed = remove_cpp(r, daft.params());
    const CVec y = daft.demodulate(trimmed.samples);

    DetectedFrame inner;
    if (cfg.inner == InnerDetector::mmse) {
        inner = mmse_detect(y, eff.daft_domain, sigma2, c);
    } else {
        WidelyLinearModel model;
        model.direct = eff.daft_domain;
        model.mirror = CMat::Zero(eff.daft_domain.rows(), eff.daft_domain.cols());
        inner = ml_detect(y, model, c);
    }

    if (!cfg.tx_enabled) return inner;

    CVec corrected =
        compensate_tx(inner.soft, tx_iqi, daft, cfg.strict_transcription);
    DetectedFrame out;
    out.hard = hard_decide(corrected, c);
    out.bits = demap_indices(out.hard, c);
    out.soft = std::move(corrected);
    return out;
}

}  // namespace afdmiq
