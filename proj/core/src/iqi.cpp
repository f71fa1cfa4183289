#include "afdmiq/iqi.hpp"

#include <cmath>
#include <stdexcept>

#include "afdmiq/channel.hpp"

namespace afdmiq {

bool IqImbalance::is_ideal() const {
    return direct == cplx{1.0, 0.0} && image == cplx{0.0, 0.0};
}

double IqImbalance::invert_gap() const {
    return std::norm(direct) - std::norm(image);
}

IqImbalance iqi_from_db(double amp_db, double phase_deg, AmpDbConvention convention) {
    if (!std::isfinite(amp_db) || !std::isfinite(phase_deg))
        throw std::invalid_argument("iqi_from_db: non-finite input");
    const double denom = convention == AmpDbConvention::power_10log ? 10.0 : 20.0;
    const double alpha = std::pow(10.0, amp_db / denom) - 1.0;
    const double theta = phase_deg * (3.141592653589793238462643383279502884 / 180.0);
    IqImbalance iqi;
    iqi.amp_mismatch = alpha;
    iqi.phase_mismatch = theta;
    const double ch = std::cos(theta / 2.0);
    const double sh = std::sin(theta / 2.0);
    iqi.direct = {ch, alpha * sh};
    iqi.image = {alpha * ch, -sh};
    if (!(std::norm(iqi.direct) > std::norm(iqi.image)))
        throw std::invalid_argument(
            "iqi_from_db: setting is not invertible (|direct| <= |image|)");
    return iqi;
}

CVec apply_iqi(const CVec& s, const IqImbalance& iqi) {
    return iqi.direct * s + iqi.image * s.conjugate();
}

TimeSignal apply_iqi(const TimeSignal& s, const IqImbalance& iqi) {
    TimeSignal out;
    out.has_cpp = s.has_cpp;
    out.samples = apply_iqi(s.samples, iqi);
    return out;
}

CVec add_awgn(const CVec& s, double sigma2, Rng& rng) {
    if (sigma2 < 0.0) throw std::invalid_argument("add_awgn: negative variance");
    return s + rng.complex_normal_vector(s.size(), sigma2);
}

NoiseStats daft_noise_stats(const IqImbalance& rx_iqi, double sigma2,
                            const DaftTransform& daft) {
    const int n = daft.params().n;
    NoiseStats stats;
    stats.sigma2_eff = (std::norm(rx_iqi.direct) + std::norm(rx_iqi.image)) * sigma2;
    stats.cov = stats.sigma2_eff * CMat::Identity(n, n);
    const CMat& a = daft.matrix();
    stats.pcov = (2.0 * rx_iqi.direct * rx_iqi.image * sigma2) * (a * a.transpose());
    return stats;
}

InterferenceTerms decompose_interference(const CVec& x, const ChannelRealization& chan,
                                         const IqImbalance& tx_iqi,
                                         const IqImbalance& rx_iqi,
                                         const DaftTransform& daft) {
    const int n = daft.params().n;
    if (x.size() != n)
        throw std::invalid_argument("decompose_interference: length mismatch");
    const EffectiveChannel eff = effective_matrix(chan, daft);
    const CMat& a = daft.matrix();
    const CMat h_at = eff.time_domain * a.transpose();
    const CMat hc_ah = eff.time_domain.conjugate() * a.adjoint();
    const CMat hc_at = eff.time_domain.conjugate() * a.transpose();

    const CVec xc = x.conjugate();
    InterferenceTerms t;
    t.wanted = (rx_iqi.direct * tx_iqi.direct) * (eff.daft_domain * x);
    t.tx_image = (rx_iqi.direct * tx_iqi.image) * daft.demodulate(CVec(h_at * xc));
    t.rx_conj_image =
        (rx_iqi.image * std::conj(tx_iqi.direct)) * daft.demodulate(CVec(hc_at * xc));
    t.rx_conj_wanted =
        (rx_iqi.image * std::conj(tx_iqi.image)) * daft.demodulate(CVec(hc_ah * x));
    return t;
}

CVec InterferenceTerms::sum() const {
    return wanted + tx_image + rx_conj_image + rx_conj_wanted;
}

}  // namespace afdmiq
