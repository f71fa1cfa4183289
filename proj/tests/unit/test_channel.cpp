#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <vector>

#include "afdmiq/channel.hpp"
#include "afdmiq/params.hpp"
#include "afdmiq/transform.hpp"
#include "test_util.hpp"

using namespace afdmiq;
using testutil::max_abs;

namespace {

ChannelSampling sampling(int paths, int tau, int nu, DopplerMode mode,
                         DelayMode delays = DelayMode::automatic) {
    ChannelSampling cfg;
    cfg.paths = paths;
    cfg.tau_max = tau;
    cfg.nu_max = nu;
    cfg.doppler_mode = mode;
    cfg.delay_mode = delays;
    return cfg;
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("sampled realizations respect the configured budgets") {
    Rng rng(101, 0, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const DopplerMode mode = trial % 3 == 0   ? DopplerMode::integer
                                 : trial % 3 == 1 ? DopplerMode::fractional
                                                  : DopplerMode::jakes;
        const ChannelRealization chan =
            sample_channel(sampling(4, 3, 2, mode), rng);
        REQUIRE(chan.paths.size() == 4);
        CHECK(chan.paths[0].delay == 0);
        std::set<int> delays;
        std::set<std::pair<int, int>> taps;
        for (const PathComponent& p : chan.paths) {
            CHECK(p.delay >= 0);
            CHECK(p.delay <= 3);
            CHECK(std::abs(p.doppler) <= 2.0 + 1e-12);
            delays.insert(p.delay);
            if (mode == DopplerMode::integer) {
                CHECK(p.doppler == std::round(p.doppler));
                taps.insert({p.delay, static_cast<int>(std::round(p.doppler))});
            }
        }
        // automatic mode with paths <= tau_max+1 keeps all delays distinct,
        // and integer mode never lets two paths share a (delay, Doppler) tap.
        CHECK(delays.size() == 4);
        if (mode == DopplerMode::integer) CHECK(taps.size() == 4);
    }
}

TEST_CASE("delay mode policies") {
    Rng rng(102, 0, 0);
    CHECK_THROWS_AS(
        (void)sample_channel(
            sampling(5, 3, 2, DopplerMode::integer, DelayMode::always_distinct),
            rng),
        std::invalid_argument);
    // iid mode may repeat delays; with 8 paths over {0..1} it must.
    const ChannelRealization chan = sample_channel(
        sampling(8, 1, 2, DopplerMode::jakes, DelayMode::iid), rng);
    std::set<int> delays;
    for (const PathComponent& p : chan.paths) delays.insert(p.delay);
    CHECK(delays.size() <= 2);
    // Integer mode with an exhausted delay-Doppler grid cannot stay distinct.
    CHECK_THROWS_AS(
        (void)sample_channel(
            sampling(2, 0, 0, DopplerMode::integer, DelayMode::iid), rng),
        std::invalid_argument);
}

TEST_CASE("default gain covariance matches (1/P) identity") {
    Rng rng(103, 0, 0);
    const int paths = 2;
    Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const ChannelRealization chan =
            sample_channel(sampling(paths, 1, 1, DopplerMode::integer), rng);
        Eigen::Vector2cd h(chan.paths[0].gain, chan.paths[1].gain);
        acc += h * h.adjoint();
    }
    acc /= static_cast<double>(draws);
    const Eigen::Matrix2cd target = 0.5 * Eigen::Matrix2cd::Identity();
    CHECK((acc - target).cwiseAbs().maxCoeff() < 0.01);  // 2% of trace scale
}

TEST_CASE("custom gain covariance is honored") {
    Rng rng(104, 0, 0);
    ChannelSampling cfg = sampling(2, 1, 1, DopplerMode::integer);
    CMat cov = CMat::Zero(2, 2);
    cov(0, 0) = 0.9;
    cov(1, 1) = 0.1;
    cfg.gain_cov = cov;
    double p0 = 0.0, p1 = 0.0;
    const int draws = 40000;
    for (int i = 0; i < draws; ++i) {
        const ChannelRealization chan = sample_channel(cfg, rng);
        p0 += std::norm(chan.paths[0].gain);
        p1 += std::norm(chan.paths[1].gain);
    }
    CHECK(p0 / draws == doctest::Approx(0.9).epsilon(0.05));
    CHECK(p1 / draws == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("time-domain convolution equals the dense matrix path") {
    const AfdmParams params = make_afdm_params(16, 1, 3, 0);
    const DaftTransform daft(params);
    Rng rng(105, 0, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
        const DopplerMode mode = trial % 3 == 0   ? DopplerMode::integer
                                 : trial % 3 == 1 ? DopplerMode::fractional
                                                  : DopplerMode::jakes;
        const ChannelRealization chan =
            sample_channel(sampling(1 + trial % 4, 3, 1, mode), rng);
        const CVec x = testutil::random_cvec(rng, 16);
        const CVec s = daft.modulate(x);
        const TimeSignal pref = add_cpp(TimeSignal{s, false}, params);
        const TimeSignal conv =
            remove_cpp(apply_time_domain(pref, chan, params), params);
        const EffectiveChannel eff = effective_matrix(chan, daft);
        worst = std::max(worst, max_abs(CVec(conv.samples - eff.time_domain * s)));
        worst = std::max(
            worst, max_abs(CVec(daft.demodulate(conv.samples) -
                                eff.daft_domain * x)));
    }
    CHECK(worst < 1e-11);
}

TEST_CASE("single Doppler path is the expected phase ramp") {
    const AfdmParams params = make_afdm_params(16, 1, 2, 0);
    const DaftTransform daft(params);
    ChannelRealization chan;
    chan.paths.push_back(PathComponent{cplx(1.0, 0.0), 0, 1.0});
    const CMat h = effective_matrix(chan, daft).time_domain;
    for (int m = 0; m < 16; ++m) {
        for (int n = 0; n < 16; ++n) {
            const double ang = -2.0 * std::numbers::pi * 1.0 * m / 16.0;
            const cplx expect =
                m == n ? cplx(std::cos(ang), std::sin(ang)) : cplx(0.0, 0.0);
            CHECK(std::abs(h(m, n) - expect) < 1e-12);
        }
    }
}

TEST_CASE("single delay path is a cyclic shift under the rule chirp rate") {
    const AfdmParams params = make_afdm_params(16, 1, 3, 0);
    const DaftTransform daft(params);
    ChannelRealization chan;
    chan.paths.push_back(PathComponent{cplx(1.0, 0.0), 2, 0.0});
    const CMat h = effective_matrix(chan, daft).time_domain;
    for (int m = 0; m < 16; ++m) {
        for (int n = 0; n < 16; ++n) {
            const cplx expect =
                n == (m - 2 + 16) % 16 ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
            CHECK(std::abs(h(m, n) - expect) < 1e-12);
        }
    }
    // And the wrap phase itself is trivial here.
    CHECK(std::abs(cpp_wrap_phase(0, 2, params) - cplx(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(cpp_wrap_phase(5, 2, params) - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("unit-gain single path preserves energy") {
    const AfdmParams params = make_afdm_params(16, 1, 3, 0);
    const DaftTransform daft(params);
    Rng rng(106, 0, 0);
    ChannelRealization chan;
    const cplx gain = std::polar(1.0, 0.77);
    chan.paths.push_back(PathComponent{gain, 1, -1.0});
    const CVec s = testutil::random_cvec(rng, 16);
    const CMat h = effective_matrix(chan, daft).time_domain;
    CHECK(std::abs((h * s).norm() - s.norm()) < 1e-10);
}

TEST_CASE("transform-domain channel is unitarily similar to the time one") {
    const AfdmParams params = make_afdm_params(12, 1, 2, 0);
    const DaftTransform daft(params);
    Rng rng(107, 0, 0);
    const ChannelRealization chan =
        sample_channel(sampling(3, 2, 1, DopplerMode::fractional), rng);
    const EffectiveChannel eff = effective_matrix(chan, daft);
    Eigen::ComplexEigenSolver<CMat> t(eff.time_domain, false);
    Eigen::ComplexEigenSolver<CMat> d(eff.daft_domain, false);
    const CVec et = t.eigenvalues();
    const CVec ed = d.eigenvalues();
    // Greedy nearest matching avoids ordering ambiguity between the two
    // solver runs.
    std::vector<bool> used(static_cast<std::size_t>(ed.size()), false);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < et.size(); ++i) {
        double best = 1e300;
        Eigen::Index pick = -1;
        for (Eigen::Index j = 0; j < ed.size(); ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            const double dist = std::abs(et[i] - ed[j]);
            if (dist < best) {
                best = dist;
                pick = j;
            }
        }
        used[static_cast<std::size_t>(pick)] = true;
        worst = std::max(worst, best);
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("time-domain application validates its inputs") {
    const AfdmParams params = make_afdm_params(16, 1, 2, 0);
    Rng rng(108, 0, 0);
    ChannelRealization chan;
    chan.paths.push_back(PathComponent{cplx(1.0, 0.0), 2, 0.0});
    TimeSignal bare{testutil::random_cvec(rng, 16), false};
    CHECK_THROWS_AS((void)apply_time_domain(bare, chan, params),
                    std::invalid_argument);
    chan.paths[0].delay = 3;  // exceeds cpp_len = 2
    const TimeSignal pref = add_cpp(bare, params);
    CHECK_THROWS_AS((void)apply_time_domain(pref, chan, params),
                    std::invalid_argument);
}

TEST_CASE("realization summaries") {
    ChannelRealization chan;
    chan.paths.push_back(PathComponent{cplx(0.6, 0.0), 0, 0.0});
    chan.paths.push_back(PathComponent{cplx(0.0, 0.8), 2, 1.0});
    CHECK(chan.max_delay() == 2);
    CHECK(chan.total_gain_power() == doctest::Approx(1.0));
}

}  // TEST_SUITE
