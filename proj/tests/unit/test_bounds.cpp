#include <doctest.h>

#include <cmath>
#include <vector>

#include "afdmiq/bounds.hpp"
#include "afdmiq/channel.hpp"
#include "afdmiq/constellation.hpp"
#include "afdmiq/iqi.hpp"
#include "afdmiq/params.hpp"
#include "afdmiq/transform.hpp"
#include "test_util.hpp"

using namespace afdmiq;
using testutil::max_abs;

namespace {

ChannelRealization make_chan(const std::vector<int>& delays,
                             const std::vector<double>& dopplers,
                             const std::vector<cplx>& gains) {
    ChannelRealization chan;
    for (std::size_t i = 0; i < delays.size(); ++i)
        chan.paths.push_back({gains[i], delays[i], dopplers[i]});
    return chan;
}

// Noiseless transform-domain output of the full joint-IQI link for one
// channel realization (matrix form, prefix-free picture).
CVec link_output(const CVec& x, const ChannelRealization& chan,
                 const DaftTransform& daft, const IqImbalance& tx,
                 const IqImbalance& rx) {
    const CMat h = effective_matrix(chan, daft).time_domain;
    return daft.demodulate(
        apply_iqi(CVec(h * apply_iqi(daft.modulate(x), tx)), rx));
}

double bound_from_eigs(const PepTerms& t) {
    double a = 1.0, b = 1.0;
    for (int l = 0; l < t.rank; ++l) {
        a *= 1.0 / (1.0 + t.gamma1 * t.eigenvalues[l]);
        b *= 1.0 / (1.0 + t.gamma2 * t.eigenvalues[l]);
    }
    return a / 12.0 + b / 4.0;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("exponential Q-function bound: pinned values and dominance") {
    CHECK(q_approx(0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(q_approx(1.0) ==
          doctest::Approx(0.17889850140086746).epsilon(1e-14));
    CHECK(q_approx(3.0) ==
          doctest::Approx(0.0015454377556867818).epsilon(1e-14));
    // The two-term exponential form undercuts Q near the origin and only
    // dominates it past the crossover below 1; check dominance from there.
    for (double x = 1.0; x <= 5.0; x += 0.25)
        CHECK(q_approx(x) >= testutil::q_func(x));
}

TEST_CASE("codeword matrices degenerate correctly without imbalance") {
    const AfdmParams params = make_afdm_params(8, 1, 2, 0);
    const DaftTransform daft(params);
    const IqImbalance ideal;
    PathGeometry geom;
    geom.delays = {0, 1, 2};
    geom.dopplers = {0.0, 1.0, -1.0};

    const CodewordMatrices cw =
        build_codeword_matrices(geom, daft, ideal, ideal);
    REQUIRE(cw.paths() == 3);
    CHECK(cw.n == 8);
    CHECK(cw.rx_noise_power == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(max_abs(cw.mirror[i]) < 1e-14);
        const ChannelRealization one = make_chan(
            {geom.delays[i]}, {geom.dopplers[i]}, {cplx(1.0, 0.0)});
        const CMat expected = effective_matrix(one, daft).daft_domain;
        CHECK(max_abs(CMat(cw.direct[i] - expected)) < 1e-12);
    }

    Rng rng(601, 0, 0);
    const CVec x = testutil::random_cvec(rng, 8);
    const SplitCodewordMap sm = codeword_map_at(geom, daft, ideal, ideal, x);
    CHECK(max_abs(sm.conj_gain_cols) < 1e-14);
    const SplitCodewordMap zero =
        codeword_map_at(geom, daft, ideal, ideal, CVec::Zero(8));
    CHECK(max_abs(zero.gain_cols) < 1e-14);
    CHECK(max_abs(zero.conj_gain_cols) < 1e-14);
}

TEST_CASE("split map reconstructs the link exactly for complex gains") {
    const AfdmParams params = make_afdm_params(8, 1, 2, 0);
    const DaftTransform daft(params);
    const IqImbalance tx = iqi_from_db(1.0, 3.0);
    const IqImbalance rx = iqi_from_db(1.5, 3.5);
    Rng rng(602, 0, 0);

    PathGeometry geom;
    geom.delays = {0, 1, 2};
    geom.dopplers = {1.0, 0.0, -1.0};
    const CVec h = rng.complex_normal_vector(3, 1.0 / 3.0);
    const ChannelRealization chan =
        make_chan(geom.delays, geom.dopplers, {h[0], h[1], h[2]});
    const CVec x = testutil::random_cvec(rng, 8);

    const SplitCodewordMap sm = codeword_map_at(geom, daft, tx, rx, x);
    const CVec recon = sm.gain_cols * h + sm.conj_gain_cols * h.conjugate();
    CHECK(max_abs(CVec(recon - link_output(x, chan, daft, tx, rx))) < 1e-10);

    // The merged per-path matrices agree with the split map column by
    // column once both gain coordinates are added onto one.
    const CodewordMatrices cw = build_codeword_matrices(geom, daft, tx, rx);
    for (std::size_t i = 0; i < 3; ++i) {
        const CVec merged =
            cw.direct[i] * x + cw.mirror[i] * x.conjugate();
        const CVec split = sm.gain_cols.col(static_cast<Eigen::Index>(i)) +
                           sm.conj_gain_cols.col(static_cast<Eigen::Index>(i));
        CHECK(max_abs(CVec(merged - split)) < 1e-12);
    }

    // For real gains the merge is lossless against the physical link.
    const CVec hr = CVec(Eigen::VectorXd::Random(3).cast<cplx>()) * 0.7;
    const ChannelRealization chan_r =
        make_chan(geom.delays, geom.dopplers, {hr[0], hr[1], hr[2]});
    CVec merged_out = CVec::Zero(8);
    for (std::size_t i = 0; i < 3; ++i)
        merged_out += hr[static_cast<Eigen::Index>(i)] *
                      (cw.direct[i] * x + cw.mirror[i] * x.conjugate());
    CHECK(max_abs(CVec(merged_out - link_output(x, chan_r, daft, tx, rx))) <
          1e-10);
}

TEST_CASE("single-path flat case reduces to the closed form") {
    const AfdmParams params = make_afdm_params(2, 0, 0, 0);
    const DaftTransform daft(params);
    const IqImbalance ideal;
    PathGeometry geom;
    geom.delays = {0};
    geom.dopplers = {0.0};
    const CodewordMatrices cw =
        build_codeword_matrices(geom, daft, ideal, ideal);

    const Constellation q = Constellation::qpsk();
    const cplx xp = q.points[0], xq = q.points[2];  // real-axis neighbors
    const double d2 = std::norm(xp - xq);
    const double sigma2 = 0.5;
    const PepTerms t = pep_bound(cw, 0, xp, xq, sigma2);

    CHECK(t.rank == 1);
    CHECK(t.sigma2_eff == doctest::Approx(sigma2).epsilon(1e-14));
    CHECK(t.gamma1 == doctest::Approx(1.0 / (4.0 * sigma2)).epsilon(1e-14));
    CHECK(t.gamma2 == doctest::Approx(1.0 / (3.0 * sigma2)).epsilon(1e-14));
    CHECK(t.gamma1 < t.gamma2);
    CHECK(t.eigenvalues[0] == doctest::Approx(d2).epsilon(1e-12));
    const double expected = (1.0 / 12.0) / (1.0 + t.gamma1 * d2) +
                            (1.0 / 4.0) / (1.0 + t.gamma2 * d2);
    CHECK(t.bound == doctest::Approx(expected).epsilon(1e-12));

    // Swapping the hypothesis pair changes nothing.
    CHECK(pep_bound(cw, 0, xq, xp, sigma2).bound ==
          doctest::Approx(t.bound).epsilon(1e-12));
}

TEST_CASE("pairwise bound sits above its own Monte Carlo estimate") {
    const AfdmParams params = make_afdm_params(4, 1, 1, 0);
    const DaftTransform daft(params);
    const IqImbalance tx = iqi_from_db(1.0, 3.0);
    const IqImbalance rx = iqi_from_db(1.5, 3.5);
    PathGeometry geom;
    geom.delays = {0, 1};
    geom.dopplers = {1.0, -1.0};
    const CodewordMatrices cw = build_codeword_matrices(geom, daft, tx, rx);

    const Constellation q = Constellation::qpsk();
    const double sigma2 = 0.4;
    const PepTerms t = pep_bound(cw, 1, q.points[0], q.points[1], sigma2);
    CHECK(bound_from_eigs(t) == doctest::Approx(t.bound).epsilon(1e-10));

    Rng rng(603, 0, 0);
    const PepEstimate mc = brute_force_pep(cw, 1, q.points[0], q.points[1],
                                           sigma2, rng, 400000);
    CHECK(mc.trials == 400000);
    CHECK(mc.std_error > 0.0);
    CHECK(t.bound >= mc.pep - 3.0 * mc.std_error);
    CHECK(t.bound <= 8.0 * (mc.pep + 3.0 * mc.std_error));
}

TEST_CASE("union bound bookkeeping matches a hand-rolled sum") {
    const AfdmParams params = make_afdm_params(4, 1, 1, 0);
    const DaftTransform daft(params);
    const IqImbalance tx = iqi_from_db(1.0, 3.0);
    const IqImbalance rx = iqi_from_db(1.5, 3.5);
    PathGeometry geom;
    geom.delays = {0, 1};
    geom.dopplers = {0.0, 1.0};
    const CodewordMatrices cw = build_codeword_matrices(geom, daft, tx, rx);
    const Constellation q = Constellation::qpsk();

    AbepConfig cfg;
    cfg.sigma2 = 0.25;
    const AbepResult res = abep_bound(cw, q, cfg);
    CHECK(res.pairs.size() == 12);  // ordered pairs of a 4-point alphabet

    double manual = 0.0;
    for (int pos = 0; pos < 4; ++pos) {
        double at_pos = 0.0;
        for (int p = 0; p < 4; ++p)
            for (int s = 0; s < 4; ++s) {
                if (p == s) continue;
                at_pos += pep_bound(cw, pos, q.points[static_cast<std::size_t>(p)],
                                    q.points[static_cast<std::size_t>(s)],
                                    cfg.sigma2)
                              .bound *
                          label_bit_distance(p, s);
            }
        manual += at_pos / (q.bits_per_symbol * 4.0);
    }
    manual /= 4.0;  // positions
    CHECK(res.abep == doctest::Approx(manual).epsilon(1e-10));

    // Fixed-position results average to the position-averaged one.
    double fixed_mean = 0.0;
    for (int pos = 0; pos < 4; ++pos) {
        AbepConfig f = cfg;
        f.positions = PositionMode::fixed;
        f.fixed_position = pos;
        fixed_mean += abep_bound(cw, q, f).abep;
    }
    CHECK(fixed_mean / 4.0 == doctest::Approx(res.abep).epsilon(1e-10));

    // Restricting to minimum-distance pairs can only reduce the sum.
    AbepConfig mind = cfg;
    mind.pairs = PairMode::min_distance;
    const AbepResult res_min = abep_bound(cw, q, mind);
    CHECK(res_min.pairs.size() == 8);
    CHECK(res_min.abep <= res.abep);
    CHECK(res_min.abep > 0.0);
}

TEST_CASE("stronger gains and quieter noise both tighten the bound") {
    const AfdmParams params = make_afdm_params(4, 1, 1, 0);
    const DaftTransform daft(params);
    const IqImbalance tx = iqi_from_db(1.0, 3.0);
    const IqImbalance rx = iqi_from_db(1.5, 3.5);
    PathGeometry geom;
    geom.delays = {0, 1};
    geom.dopplers = {0.0, 1.0};
    const CodewordMatrices cw = build_codeword_matrices(geom, daft, tx, rx);
    const Constellation q = Constellation::qpsk();

    const double sigma2 = 0.25;
    const CMat base_cov = 0.5 * CMat::Identity(2, 2);
    const double mid =
        pep_bound(cw, 0, q.points[0], q.points[1], sigma2, base_cov).bound;
    const double strong =
        pep_bound(cw, 0, q.points[0], q.points[1], sigma2, CMat(2.0 * base_cov))
            .bound;
    const double weak =
        pep_bound(cw, 0, q.points[0], q.points[1], sigma2, CMat(0.5 * base_cov))
            .bound;
    CHECK(strong < mid);
    CHECK(mid < weak);

    ChannelSampling cs;
    cs.paths = 2;
    cs.tau_max = 1;
    cs.nu_max = 1;
    AbepConfig cfg;
    cfg.sigma2 = 0.2;
    Rng rng_a(604, 0, 0);
    Rng rng_b(604, 0, 0);
    const double avg_a =
        averaged_abep_bound(cs, daft, tx, rx, q, cfg, rng_a, 40);
    const double avg_b =
        averaged_abep_bound(cs, daft, tx, rx, q, cfg, rng_b, 40);
    CHECK(avg_a == avg_b);

    AbepConfig quieter = cfg;
    quieter.sigma2 = 0.05;
    Rng rng_c(604, 0, 0);
    const double avg_quiet =
        averaged_abep_bound(cs, daft, tx, rx, q, quieter, rng_c, 40);
    CHECK(avg_quiet < avg_a);
}

}  // TEST_SUITE
