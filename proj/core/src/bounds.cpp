#include "afdmiq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace afdmiq {
namespace {

constexpr double kRankCutoff = 1e-10;

// Hermitian PSD square root via spectral decomposition.
CMat matrix_sqrt(const CMat& m) {
    Eigen::SelfAdjointEigenSolver<CMat> es(m);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("matrix_sqrt: eigendecomposition failed");
    }
    Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * vals.asDiagonal() *
           es.eigenvectors().adjoint();
}

CMat gain_cov_or_default(const std::optional<CMat>& gain_cov,
                         std::size_t paths) {
    const Eigen::Index p = static_cast<Eigen::Index>(paths);
    if (!gain_cov) {
        return CMat::Identity(p, p) / static_cast<double>(paths);
    }
    if (gain_cov->rows() != p || gain_cov->cols() != p) {
        throw std::invalid_argument("gain covariance has wrong dimensions");
    }
    return *gain_cov;
}

// The pairwise difference map at one subcarrier position: the N x P matrix
// whose i-th column is direct[i](:,pos)*delta + mirror[i](:,pos)*conj(delta).
CMat difference_map(const CodewordMatrices& cw, int position, cplx delta) {
    const Eigen::Index p = static_cast<Eigen::Index>(cw.paths());
    CMat diff(cw.n, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        diff.col(i) = cw.direct[static_cast<std::size_t>(i)].col(position) * delta +
                      cw.mirror[static_cast<std::size_t>(i)].col(position) *
                          std::conj(delta);
    }
    return diff;
}

// Covariance-weighted eigenvalues eig(C^{1/2} D^H D C^{1/2}).
Eigen::VectorXd weighted_eigenvalues(const CodewordMatrices& cw, int position,
                                     cplx delta, const CMat& cov_sqrt) {
    const CMat diff = difference_map(cw, position, delta);
    CMat weighted = cov_sqrt * (diff.adjoint() * diff) * cov_sqrt;
    Eigen::SelfAdjointEigenSolver<CMat> es(weighted);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("pep_bound: eigendecomposition failed");
    }
    return es.eigenvalues().cwiseMax(0.0);
}

// Same bound via determinants: prod_k (1 + g*lambda_k) = det(I + g*D^H D C),
// since D^H D C is similar to the Hermitian weighted form. Zero eigenvalues
// contribute unit factors, so no rank cutoff is needed here.
double pep_value(const CodewordMatrices& cw, int position, cplx delta,
                 double gamma1, double gamma2, const CMat& cov) {
    const CMat diff = difference_map(cw, position, delta);
    const CMat m = (diff.adjoint() * diff) * cov;
    const Eigen::Index p = m.rows();
    const double d1 = (CMat::Identity(p, p) + gamma1 * m).determinant().real();
    const double d2 = (CMat::Identity(p, p) + gamma2 * m).determinant().real();
    return 1.0 / (12.0 * d1) + 1.0 / (4.0 * d2);
}

}  // namespace

double q_approx(double x) {
    return std::exp(-x * x / 2.0) / 12.0 + std::exp(-2.0 * x * x / 3.0) / 4.0;
}

PathGeometry geometry_of(const ChannelRealization& chan) {
    PathGeometry g;
    g.delays.reserve(chan.paths.size());
    g.dopplers.reserve(chan.paths.size());
    for (const PathComponent& p : chan.paths) {
        g.delays.push_back(p.delay);
        g.dopplers.push_back(p.doppler);
    }
    return g;
}

CodewordMatrices build_codeword_matrices(const PathGeometry& geom,
                                         const DaftTransform& daft,
                                         const IqImbalance& tx_iqi,
                                         const IqImbalance& rx_iqi) {
    if (geom.delays.size() != geom.dopplers.size()) {
        throw std::invalid_argument("geometry delay/doppler size mismatch");
    }
    const int n = daft.params().n;
    const CMat a_h = daft.matrix().adjoint();
    const CMat a_t = daft.matrix().transpose();

    CodewordMatrices cw;
    cw.n = n;
    cw.rx_noise_power = std::norm(rx_iqi.direct) + std::norm(rx_iqi.image);
    cw.direct.reserve(geom.size());
    cw.mirror.reserve(geom.size());

    const cplx mm = rx_iqi.direct * tx_iqi.direct;
    const cplx mv = rx_iqi.direct * tx_iqi.image;
    const cplx vm = rx_iqi.image * std::conj(tx_iqi.direct);
    const cplx vv = rx_iqi.image * std::conj(tx_iqi.image);

    for (std::size_t i = 0; i < geom.size(); ++i) {
        ChannelRealization single;
        single.paths.push_back(
            PathComponent{cplx(1.0, 0.0), geom.delays[i], geom.dopplers[i]});
        const CMat g = effective_matrix(single, daft).time_domain;
        const CMat gc = g.conjugate();
        // Direct branch carries x, mirror branch carries conj(x); the
        // conjugate-gain path is merged onto the same gain coordinate.
        cw.direct.push_back(daft.demodulate_columns(mm * (g * a_h) +
                                                    vv * (gc * a_h)));
        cw.mirror.push_back(daft.demodulate_columns(mv * (g * a_t) +
                                                    vm * (gc * a_t)));
    }
    return cw;
}

SplitCodewordMap codeword_map_at(const PathGeometry& geom,
                                 const DaftTransform& daft,
                                 const IqImbalance& tx_iqi,
                                 const IqImbalance& rx_iqi, const CVec& x) {
    if (geom.delays.size() != geom.dopplers.size()) {
        throw std::invalid_argument("geometry delay/doppler size mismatch");
    }
    const int n = daft.params().n;
    if (x.size() != n) {
        throw std::invalid_argument("codeword_map_at: symbol length mismatch");
    }
    const cplx mm = rx_iqi.direct * tx_iqi.direct;
    const cplx mv = rx_iqi.direct * tx_iqi.image;
    const cplx vm = rx_iqi.image * std::conj(tx_iqi.direct);
    const cplx vv = rx_iqi.image * std::conj(tx_iqi.image);

    const CVec s = daft.modulate(x);
    const CVec sc = s.conjugate();

    SplitCodewordMap map;
    map.gain_cols.resize(n, static_cast<Eigen::Index>(geom.size()));
    map.conj_gain_cols.resize(n, static_cast<Eigen::Index>(geom.size()));
    for (std::size_t i = 0; i < geom.size(); ++i) {
        ChannelRealization single;
        single.paths.push_back(
            PathComponent{cplx(1.0, 0.0), geom.delays[i], geom.dopplers[i]});
        const CMat g = effective_matrix(single, daft).time_domain;
        const CMat gc = g.conjugate();
        const auto col = static_cast<Eigen::Index>(i);
        map.gain_cols.col(col) =
            mm * daft.demodulate(g * s) + mv * daft.demodulate(g * sc);
        map.conj_gain_cols.col(col) =
            vm * daft.demodulate(gc * sc) + vv * daft.demodulate(gc * s);
    }
    return map;
}

PepTerms pep_bound(const CodewordMatrices& cw, int position, cplx xp, cplx xq,
                   double sigma2, const std::optional<CMat>& gain_cov) {
    if (position < 0 || position >= cw.n) {
        throw std::invalid_argument("pep_bound: position out of range");
    }
    if (!(sigma2 > 0.0)) {
        throw std::invalid_argument("pep_bound: sigma2 must be positive");
    }
    const CMat cov_sqrt = matrix_sqrt(gain_cov_or_default(gain_cov, cw.paths()));
    const Eigen::VectorXd all = weighted_eigenvalues(cw, position, xp - xq,
                                                     cov_sqrt);

    PepTerms t;
    t.sigma2_eff = cw.rx_noise_power * sigma2;
    t.gamma1 = 1.0 / (4.0 * t.sigma2_eff);
    t.gamma2 = 1.0 / (3.0 * t.sigma2_eff);

    const double cutoff = all.size() > 0 ? kRankCutoff * all.maxCoeff() : 0.0;
    std::vector<double> kept;
    for (Eigen::Index k = 0; k < all.size(); ++k) {
        if (all[k] > cutoff && all[k] > 0.0) kept.push_back(all[k]);
    }
    t.rank = static_cast<int>(kept.size());
    t.eigenvalues = Eigen::Map<const Eigen::VectorXd>(
        kept.data(), static_cast<Eigen::Index>(kept.size()));

    double prod1 = 1.0, prod2 = 1.0;
    for (double lam : kept) {
        prod1 *= 1.0 + t.gamma1 * lam;
        prod2 *= 1.0 + t.gamma2 * lam;
    }
    t.bound = 1.0 / (12.0 * prod1) + 1.0 / (4.0 * prod2);
    return t;
}

AbepResult abep_bound(const CodewordMatrices& cw, const Constellation& c,
                      const AbepConfig& cfg) {
    const int m = static_cast<int>(c.points.size());
    const int nb = c.bits_per_symbol;

    // Restrict to minimum-distance pairs when asked; they dominate the union
    // bound at high SNR.
    double min_d2 = std::numeric_limits<double>::infinity();
    if (cfg.pairs == PairMode::min_distance) {
        for (int p = 0; p < m; ++p) {
            for (int q = 0; q < m; ++q) {
                if (p == q) continue;
                min_d2 = std::min(min_d2, std::norm(c.points[static_cast<std::size_t>(p)] -
                                                    c.points[static_cast<std::size_t>(q)]));
            }
        }
    }

    std::vector<int> positions;
    if (cfg.positions == PositionMode::averaged) {
        positions.resize(static_cast<std::size_t>(cw.n));
        for (int i = 0; i < cw.n; ++i) positions[static_cast<std::size_t>(i)] = i;
    } else {
        if (cfg.fixed_position < 0 || cfg.fixed_position >= cw.n) {
            throw std::invalid_argument("abep_bound: fixed position out of range");
        }
        positions.push_back(cfg.fixed_position);
    }

    if (!(cfg.sigma2 > 0.0)) {
        throw std::invalid_argument("abep_bound: sigma2 must be positive");
    }
    const CMat cov = gain_cov_or_default(cfg.gain_cov, cw.paths());
    const double sigma2_eff = cw.rx_noise_power * cfg.sigma2;
    const double gamma1 = 1.0 / (4.0 * sigma2_eff);
    const double gamma2 = 1.0 / (3.0 * sigma2_eff);

    AbepResult out;
    double total = 0.0;
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
            if (p == q) continue;
            const cplx xp = c.points[static_cast<std::size_t>(p)];
            const cplx xq = c.points[static_cast<std::size_t>(q)];
            if (cfg.pairs == PairMode::min_distance &&
                std::norm(xp - xq) > min_d2 * (1.0 + 1e-9)) {
                continue;
            }
            double pep_avg = 0.0;
            for (int pos : positions) {
                pep_avg += pep_value(cw, pos, xp - xq, gamma1, gamma2, cov);
            }
            pep_avg /= static_cast<double>(positions.size());
            const int nbe = label_bit_distance(p, q);
            total += pep_avg * static_cast<double>(nbe);
            out.pairs.push_back(PairContribution{p, q, pep_avg, nbe});
        }
    }
    out.abep = total / (static_cast<double>(nb) *
                        static_cast<double>(1 << nb));
    return out;
}

double averaged_abep_bound(const ChannelSampling& sampling,
                           const DaftTransform& daft,
                           const IqImbalance& tx_iqi, const IqImbalance& rx_iqi,
                           const Constellation& c, const AbepConfig& cfg,
                           Rng& rng, int draws) {
    if (draws <= 0) {
        throw std::invalid_argument("averaged_abep_bound: draws must be positive");
    }
    double acc = 0.0;
    for (int d = 0; d < draws; ++d) {
        const ChannelRealization chan = sample_channel(sampling, rng);
        const CodewordMatrices cw =
            build_codeword_matrices(geometry_of(chan), daft, tx_iqi, rx_iqi);
        acc += abep_bound(cw, c, cfg).abep;
    }
    return acc / static_cast<double>(draws);
}

PepEstimate brute_force_pep(const CodewordMatrices& cw, int position, cplx xp,
                            cplx xq, double sigma2, Rng& rng, long trials,
                            const std::optional<CMat>& gain_cov) {
    if (trials <= 0) {
        throw std::invalid_argument("brute_force_pep: trials must be positive");
    }
    const std::size_t p = cw.paths();
    const CMat cov_sqrt = matrix_sqrt(gain_cov_or_default(gain_cov, p));
    const double sigma2_eff = cw.rx_noise_power * sigma2;

    // Signature of one symbol at the position under each hypothesis, per
    // unit path gain.
    CMat sig_p(cw.n, static_cast<Eigen::Index>(p));
    CMat sig_q(cw.n, static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
        sig_p.col(static_cast<Eigen::Index>(i)) =
            cw.direct[i].col(position) * xp + cw.mirror[i].col(position) * std::conj(xp);
        sig_q.col(static_cast<Eigen::Index>(i)) =
            cw.direct[i].col(position) * xq + cw.mirror[i].col(position) * std::conj(xq);
    }

    double errors = 0.0;
    for (long t = 0; t < trials; ++t) {
        CVec h = cov_sqrt * rng.complex_normal_vector(static_cast<int>(p), 1.0);
        const CVec mean_p = sig_p * h;
        const CVec mean_q = sig_q * h;
        const CVec y = mean_p + rng.complex_normal_vector(cw.n, sigma2_eff);
        const double dp = (y - mean_p).squaredNorm();
        const double dq = (y - mean_q).squaredNorm();
        if (dq < dp) {
            errors += 1.0;
        } else if (dq == dp) {
            errors += 0.5;
        }
    }
    PepEstimate e;
    e.trials = trials;
    e.pep = errors / static_cast<double>(trials);
    e.std_error = std::sqrt(std::max(e.pep * (1.0 - e.pep), 1e-300) /
                            static_cast<double>(trials));
    return e;
}

}  // namespace afdmiq
