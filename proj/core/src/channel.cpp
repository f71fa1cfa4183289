#include "afdmiq/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>

namespace afdmiq {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559005768;

cplx unit_phase(double turns) {
    const double a = -kTwoPi * std::fmod(turns, 1.0);
    return {std::cos(a), std::sin(a)};
}
}  // namespace

int ChannelRealization::max_delay() const {
    int d = 0;
    for (const auto& p : paths) d = std::max(d, p.delay);
    return d;
}

double ChannelRealization::total_gain_power() const {
    double s = 0.0;
    for (const auto& p : paths) s += std::norm(p.gain);
    return s;
}

cplx cpp_wrap_phase(int n, int delay, const AfdmParams& params) {
    if (n >= delay) return {1.0, 0.0};
    const double nn = static_cast<double>(params.n);
    const double turns = params.c1 * (nn * nn - 2.0 * nn * (delay - n));
    return unit_phase(turns);
}

ChannelRealization sample_channel(const ChannelSampling& cfg, Rng& rng) {
    if (cfg.paths < 1) throw std::invalid_argument("sample_channel: paths must be >= 1");
    if (cfg.tau_max < 0 || cfg.nu_max < 0)
        throw std::invalid_argument("sample_channel: negative delay/Doppler budget");

    const bool want_distinct = cfg.delay_mode == DelayMode::always_distinct ||
                               (cfg.delay_mode == DelayMode::automatic &&
                                cfg.paths <= cfg.tau_max + 1);
    if (cfg.delay_mode == DelayMode::always_distinct && cfg.paths > cfg.tau_max + 1)
        throw std::invalid_argument(
            "sample_channel: cannot draw distinct delays, paths exceed tau_max+1");

    ChannelRealization chan;
    chan.paths.resize(static_cast<size_t>(cfg.paths));

    // Delays; the first path is always the line-of-sight tap at delay 0.
    if (want_distinct) {
        std::vector<int> pool(static_cast<size_t>(cfg.tau_max) + 1);
        std::iota(pool.begin(), pool.end(), 0);
        // Partial Fisher-Yates over {1..tau_max} after pinning delay 0.
        chan.paths[0].delay = 0;
        int avail = cfg.tau_max;  // pool[1..avail] remain candidates
        for (int i = 1; i < cfg.paths; ++i) {
            const int j = static_cast<int>(rng.uniform_int(1, avail));
            chan.paths[static_cast<size_t>(i)].delay = pool[static_cast<size_t>(j)];
            std::swap(pool[static_cast<size_t>(j)], pool[static_cast<size_t>(avail)]);
            --avail;
        }
    } else {
        chan.paths[0].delay = 0;
        for (int i = 1; i < cfg.paths; ++i)
            chan.paths[static_cast<size_t>(i)].delay =
                static_cast<int>(rng.uniform_int(0, cfg.tau_max));
    }

    // Doppler values. Integer mode keeps (delay, Doppler) pairs distinct so
    // no two paths collapse onto the same effective tap.
    switch (cfg.doppler_mode) {
        case DopplerMode::integer: {
            std::set<std::pair<int, int>> used;
            for (auto& p : chan.paths) {
                for (;;) {
                    const int nu = static_cast<int>(rng.uniform_int(-cfg.nu_max, cfg.nu_max));
                    if (used.insert({p.delay, nu}).second) {
                        p.doppler = nu;
                        break;
                    }
                    if (used.size() >= static_cast<size_t>((cfg.tau_max + 1)) *
                                           (2 * static_cast<size_t>(cfg.nu_max) + 1))
                        throw std::invalid_argument(
                            "sample_channel: delay-Doppler grid too small for distinct paths");
                }
            }
            break;
        }
        case DopplerMode::fractional:
            for (auto& p : chan.paths)
                p.doppler = (2.0 * rng.uniform() - 1.0) * cfg.nu_max;
            break;
        case DopplerMode::jakes:
            for (auto& p : chan.paths)
                p.doppler = cfg.nu_max * std::cos(kTwoPi * rng.uniform());
            break;
    }

    // Gains: h ~ CN(0, C); default C = (1/P) I.
    const int np = cfg.paths;
    CVec white(np);
    for (int i = 0; i < np; ++i) white[i] = rng.complex_normal(1.0);
    if (cfg.gain_cov) {
        if (cfg.gain_cov->rows() != np || cfg.gain_cov->cols() != np)
            throw std::invalid_argument("sample_channel: gain covariance size mismatch");
        Eigen::LLT<CMat> llt(*cfg.gain_cov);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("sample_channel: gain covariance not positive definite");
        white = llt.matrixL() * white;
    } else {
        white *= 1.0 / std::sqrt(static_cast<double>(np));
    }
    for (int i = 0; i < np; ++i) chan.paths[static_cast<size_t>(i)].gain = white[i];
    return chan;
}

TimeSignal apply_time_domain(const TimeSignal& frame, const ChannelRealization& chan,
                             const AfdmParams& params) {
    if (!frame.has_cpp)
        throw std::invalid_argument("apply_time_domain: frame must carry its prefix");
    const int l = params.cpp_len;
    const int total = params.n + l;
    if (frame.samples.size() != total)
        throw std::invalid_argument("apply_time_domain: frame length mismatch");
    if (chan.max_delay() > l)
        throw std::invalid_argument("apply_time_domain: path delay exceeds prefix length");

    TimeSignal out;
    out.has_cpp = true;
    out.samples = CVec::Zero(total);
    const double inv_n = 1.0 / static_cast<double>(params.n);
    for (const auto& p : chan.paths) {
        for (int n = p.delay; n < total; ++n) {
            // Doppler phase referenced to the first post-prefix sample.
            const double turns = p.doppler * static_cast<double>(n - l) * inv_n;
            out.samples[n] += p.gain * unit_phase(turns) * frame.samples[n - p.delay];
        }
    }
    return out;
}

EffectiveChannel effective_matrix(const ChannelRealization& chan,
                                  const DaftTransform& daft) {
    const AfdmParams& params = daft.params();
    const int n = params.n;
    if (chan.max_delay() > params.cpp_len)
        throw std::invalid_argument("effective_matrix: path delay exceeds prefix length");

    EffectiveChannel eff;
    eff.time_domain = CMat::Zero(n, n);
    const CMat& a = daft.matrix();
    const CMat ah = a.adjoint();
    CMat h_ah = CMat::Zero(n, n);  // time_domain * A^H, built row-wise
    const double inv_n = 1.0 / static_cast<double>(n);
    for (const auto& p : chan.paths) {
        for (int row = 0; row < n; ++row) {
            const int col = (row - p.delay + n) % n;
            const cplx w = p.gain * cpp_wrap_phase(row, p.delay, params) *
                           unit_phase(p.doppler * row * inv_n);
            eff.time_domain(row, col) += w;
            h_ah.row(row) += w * ah.row(col);
        }
    }
    eff.daft_domain = daft.demodulate_columns(h_ah);
    return eff;
}

}  // namespace afdmiq
