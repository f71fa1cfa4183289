#include "afdmiq/detect.hpp"

#include <cmath>
#include <stdexcept>

#include "afdmiq/transform.hpp"

namespace afdmiq {
namespace {

DetectedFrame decide(CVec soft, const Constellation& c) {
    DetectedFrame out;
    out.hard = hard_decide(soft, c);
    out.bits = demap_indices(out.hard, c);
    out.soft = std::move(soft);
    return out;
}

}  // namespace

WidelyLinearModel build_wl_model(const ChannelRealization& chan,
                                 const DaftTransform& daft,
                                 const IqImbalance& tx_iqi,
                                 const IqImbalance& rx_iqi) {
    const EffectiveChannel eff = effective_matrix(chan, daft);
    const CMat& h = eff.time_domain;
    const CMat a_h = daft.matrix().adjoint();
    const CMat a_t = daft.matrix().transpose();

    // y = mu_r A H s + nu_r A conj(H s) + noise, with s = mu_t A^H x + nu_t A^T x*.
    const CMat h_ah = h * a_h;                  // A^H path, direct
    const CMat h_at = h * a_t;                  // A^T path, conjugated input
    const CMat hc_ah = h.conjugate() * a_h;     // conj branch, same input
    const CMat hc_at = h.conjugate() * a_t;

    WidelyLinearModel m;
    m.direct = daft.demodulate_columns(tx_iqi.direct * rx_iqi.direct * h_ah +
                                       std::conj(tx_iqi.image) * rx_iqi.image * hc_ah);
    m.mirror = daft.demodulate_columns(tx_iqi.image * rx_iqi.direct * h_at +
                                       std::conj(tx_iqi.direct) * rx_iqi.image * hc_at);
    return m;
}

WidelyLinearModel build_wl_model_rx_only(const ChannelRealization& chan,
                                         const DaftTransform& daft,
                                         const IqImbalance& rx_iqi) {
    const EffectiveChannel eff = effective_matrix(chan, daft);
    WidelyLinearModel m;
    m.direct = rx_iqi.direct * eff.daft_domain;
    m.mirror = rx_iqi.image *
               daft.demodulate_columns(eff.time_domain.conjugate() *
                                       daft.matrix().transpose());
    return m;
}

DetectedFrame mmse_detect(const CVec& y, const CMat& h_eff, double sigma2,
                          const Constellation& c) {
    CMat gram = h_eff * h_eff.adjoint();
    gram.diagonal().array() += sigma2;
    Eigen::LLT<CMat> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("mmse_detect: Gram matrix factorization failed");
    }
    CVec soft = h_eff.adjoint() * llt.solve(y);
    return decide(std::move(soft), c);
}

DetectedFrame ml_detect(const CVec& y, const WidelyLinearModel& model,
                        const Constellation& c) {
    const int n = static_cast<int>(y.size());
    const int m = static_cast<int>(c.points.size());
    if (model.direct.rows() != n || model.direct.cols() != n ||
        model.mirror.rows() != n || model.mirror.cols() != n) {
        throw std::invalid_argument("ml_detect: model dimension mismatch");
    }
    double hypotheses = std::pow(static_cast<double>(m), n);
    if (hypotheses > static_cast<double>(1 << 20)) {
        throw std::invalid_argument(
            "ml_detect: search space exceeds 2^20 hypotheses");
    }

    // Start from the all-index-0 vector.
    Eigen::VectorXi idx = Eigen::VectorXi::Zero(n);
    const cplx p0 = c.points[0];
    CVec r = y - (model.direct.rowwise().sum() * p0) -
             (model.mirror.rowwise().sum() * std::conj(p0));
    double best = r.squaredNorm();
    Eigen::VectorXi best_idx = idx;

    // Loopless mixed-radix reflected Gray enumeration: exactly one symbol
    // changes between consecutive hypotheses, so each residual update costs
    // one direct column and one mirror column.
    std::vector<int> focus(n + 1);
    std::vector<int> dir(n, 1);
    for (int i = 0; i <= n; ++i) focus[i] = i;

    for (;;) {
        const int j = focus[0];
        focus[0] = 0;
        if (j == n) break;
        const cplx old_p = c.points[static_cast<std::size_t>(idx[j])];
        idx[j] += dir[j];
        const cplx new_p = c.points[static_cast<std::size_t>(idx[j])];
        if (idx[j] == 0 || idx[j] == m - 1) {
            dir[j] = -dir[j];
            focus[j] = focus[j + 1];
            focus[j + 1] = j + 1;
        }
        const cplx d = new_p - old_p;
        r.noalias() -= model.direct.col(j) * d;
        r.noalias() -= model.mirror.col(j) * std::conj(d);
        const double metric = r.squaredNorm();
        if (metric < best) {
            best = metric;
            best_idx = idx;
        }
    }

    DetectedFrame out;
    out.soft.resize(n);
    for (int i = 0; i < n; ++i) {
        out.soft[i] = c.points[static_cast<std::size_t>(best_idx[i])];
    }
    out.hard = std::move(best_idx);
    out.bits = demap_indices(out.hard, c);
    return out;
}

DetectedFrame wl_mmse_detect(const CVec& y, const WidelyLinearModel& model,
                             const NoiseStats& noise, const Constellation& c) {
    const Eigen::Index n = y.size();
    if (model.direct.rows() != n || model.mirror.rows() != n) {
        throw std::invalid_argument("wl_mmse_detect: model dimension mismatch");
    }

    // Symbol pseudo-variance E[x^2] for the (unit-energy, zero-mean) alphabet.
    cplx pseudo(0.0, 0.0);
    for (const cplx& p : c.points) pseudo += p * p;
    pseudo /= static_cast<double>(c.points.size());

    const Eigen::Index n2 = 2 * n;
    CMat b(n2, n2);
    b.topLeftCorner(n, n) = model.direct;
    b.topRightCorner(n, n) = model.mirror;
    b.bottomLeftCorner(n, n) = model.mirror.conjugate();
    b.bottomRightCorner(n, n) = model.direct.conjugate();

    CMat r_aug = CMat::Identity(n2, n2);
    r_aug.topRightCorner(n, n).diagonal().setConstant(pseudo);
    r_aug.bottomLeftCorner(n, n).diagonal().setConstant(std::conj(pseudo));

    CMat c_aug(n2, n2);
    c_aug.topLeftCorner(n, n) = noise.cov;
    c_aug.topRightCorner(n, n) = noise.pcov;
    c_aug.bottomLeftCorner(n, n) = noise.pcov.conjugate();
    c_aug.bottomRightCorner(n, n) = noise.cov.conjugate();

    CMat gram = b * r_aug * b.adjoint() + c_aug;
    CVec z(n2);
    z.head(n) = y;
    z.tail(n) = y.conjugate();

    // E[x z^H] = [I, pseudo*I] B^H; solve with LDLT since the augmented
    // covariance is Hermitian but can be near-semidefinite.
    Eigen::LDLT<CMat> ldlt(gram);
    if (ldlt.info() != Eigen::Success) {
        throw std::runtime_error("wl_mmse_detect: augmented Gram factorization failed");
    }
    const CVec sol = ldlt.solve(z);
    CMat cross(n, n2);
    cross.leftCols(n) = CMat::Identity(n, n);
    cross.rightCols(n) = pseudo * CMat::Identity(n, n);
    CVec soft = (cross * b.adjoint()) * sol;
    return decide(std::move(soft), c);
}

}  // namespace afdmiq
