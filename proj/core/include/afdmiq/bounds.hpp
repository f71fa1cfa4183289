// bounds.hpp - Analytical pairwise and average bit error probability bounds
// for ML detection under joint Tx/Rx IQ imbalance, plus a Monte Carlo
// reference for the same analysis model.
#pragma once

#include <optional>
#include <vector>

#include "afdmiq/channel.hpp"
#include "afdmiq/constellation.hpp"
#include "afdmiq/iqi.hpp"
#include "afdmiq/rng.hpp"
#include "afdmiq/transform.hpp"
#include "afdmiq/types.hpp"

namespace afdmiq {

/// Exponential upper bound on the Gaussian Q-function:
/// q_approx(x) = e^{-x^2/2}/12 + e^{-2x^2/3}/4.
double q_approx(double x);

/// Delay/Doppler geometry of a channel, with gains abstracted away.
struct PathGeometry {
    std::vector<int> delays;
    std::vector<double> dopplers;
    std::size_t size() const { return delays.size(); }
};

PathGeometry geometry_of(const ChannelRealization& chan);

/**
 * Per-path transfer matrices of the merged codeword map. For each path i
 * (unit gain), direct[i]*x + mirror[i]*conj(x) is the path's contribution
 * to the received transform-domain vector, with both IQI stages folded in
 * and the conjugate-gain branch merged onto the same gain coordinate.
 * The merged map treats the two branches as sharing one gain per path; the
 * error bounds below inherit that modeling choice.
 */
struct CodewordMatrices {
    std::vector<CMat> direct;  // one N x N matrix per path
    std::vector<CMat> mirror;
    double rx_noise_power = 1.0;  // |direct_rx|^2 + |image_rx|^2
    int n = 0;
    std::size_t paths() const { return direct.size(); }
};

CodewordMatrices build_codeword_matrices(const PathGeometry& geom,
                                         const DaftTransform& daft,
                                         const IqImbalance& tx_iqi,
                                         const IqImbalance& rx_iqi);

/**
 * Codeword map evaluated at a fixed symbol vector, with the two gain
 * coordinates kept separate: gain_cols.col(i) multiplies path gain h_i and
 * conj_gain_cols.col(i) multiplies conj(h_i). gain_cols*h +
 * conj_gain_cols*conj(h) reconstructs the noiseless joint-IQI output
 * exactly for complex gains; CodewordMatrices adds the two families onto
 * one shared gain coordinate, which is what the bounds below consume.
 */
struct SplitCodewordMap {
    CMat gain_cols;       // N x P
    CMat conj_gain_cols;  // N x P
};

SplitCodewordMap codeword_map_at(const PathGeometry& geom,
                                 const DaftTransform& daft,
                                 const IqImbalance& tx_iqi,
                                 const IqImbalance& rx_iqi, const CVec& x);

struct PepTerms {
    double bound = 0.0;        // the PEP upper bound itself
    Eigen::VectorXd eigenvalues;  // retained covariance-weighted eigenvalues
    int rank = 0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double sigma2_eff = 0.0;   // noise variance after Rx IQI
};

/**
 * PEP upper bound for mistaking symbol xp at the given subcarrier position
 * for xq, averaged over the path gains. Gains default to i.i.d. with total
 * unit power (covariance I/P); pass gain_cov to override. Eigenvalues below
 * 1e-10 of the largest are treated as zero rank.
 */
PepTerms pep_bound(const CodewordMatrices& cw, int position, cplx xp, cplx xq,
                   double sigma2,
                   const std::optional<CMat>& gain_cov = std::nullopt);

enum class PositionMode { averaged, fixed };
enum class PairMode { all, min_distance };

struct AbepConfig {
    double sigma2 = 0.0;
    PositionMode positions = PositionMode::averaged;
    int fixed_position = 0;
    PairMode pairs = PairMode::all;
    std::optional<CMat> gain_cov;
};

struct PairContribution {
    int from = 0;
    int to = 0;
    double pep = 0.0;
    int bit_distance = 0;
};

struct AbepResult {
    double abep = 0.0;
    std::vector<PairContribution> pairs;  // position-averaged per symbol pair
};

/**
 * Union bound on the average bit error probability: sum over ordered symbol
 * pairs of PEP times bit distance, normalized by bits per symbol and
 * alphabet size, averaged over subcarrier positions unless fixed.
 */
AbepResult abep_bound(const CodewordMatrices& cw, const Constellation& c,
                      const AbepConfig& cfg);

/**
 * abep_bound averaged over channel geometries drawn from sampling (gains are
 * irrelevant to the draw); pairs with simulations that redraw the channel
 * per frame.
 */
double averaged_abep_bound(const ChannelSampling& sampling,
                           const DaftTransform& daft,
                           const IqImbalance& tx_iqi, const IqImbalance& rx_iqi,
                           const Constellation& c, const AbepConfig& cfg,
                           Rng& rng, int draws);

struct PepEstimate {
    double pep = 0.0;
    double std_error = 0.0;
    long trials = 0;
};

/**
 * Monte Carlo PEP for the same merged analysis model the bound is built on:
 * y = (sum_i h_i (direct[i] xp + mirror[i] conj(xp))) + w with w proper of
 * variance sigma2_eff, deciding between xp and xq by nearest model point.
 * Metric ties count one half. Validates pep_bound, not the full link.
 */
PepEstimate brute_force_pep(const CodewordMatrices& cw, int position, cplx xp,
                            cplx xq, double sigma2, Rng& rng, long trials,
                            const std::optional<CMat>& gain_cov = std::nullopt);

}  // namespace afdmiq
