// channel.hpp - Doubly selective multipath channel model.
//
// Each path applies a complex gain, an integer sample delay, and a Doppler
// phase ramp exp(-j*(2*pi/N)*nu*n). In matrix form over one prefix-stripped
// frame, H = sum_i h_i * G_i * D_i * S^tau_i where S is the forward cyclic
// shift, D the Doppler diagonal, and G the prefix wrap phase (identity for
// rule-derived c1 on even N). The DAFT-domain channel is A * H * A^H.
#pragma once

#include <optional>
#include <vector>

#include "afdmiq/params.hpp"
#include "afdmiq/rng.hpp"
#include "afdmiq/transform.hpp"
#include "afdmiq/types.hpp"

namespace afdmiq {

struct PathComponent {
    cplx gain;
    int delay = 0;        // samples, 0 <= delay <= tau_max
    double doppler = 0.;  // bins; integer-valued in integer mode
};

struct ChannelRealization {
    std::vector<PathComponent> paths;

    [[nodiscard]] int max_delay() const;
    [[nodiscard]] double total_gain_power() const;
};

enum class DopplerMode { integer, fractional, jakes };

/// Delay drawing policy. `automatic` uses distinct delays when the path count
/// fits in {0..tau_max} and falls back to i.i.d. uniform delays otherwise;
/// `always_distinct` errors when it cannot; `iid` never deduplicates delays.
enum class DelayMode { automatic, always_distinct, iid };

struct ChannelSampling {
    int paths = 1;
    int tau_max = 0;
    int nu_max = 0;
    DopplerMode doppler_mode = DopplerMode::integer;
    DelayMode delay_mode = DelayMode::automatic;
    /// Gain covariance; defaults to (1/paths) * I (unit total power).
    std::optional<CMat> gain_cov;
};

/**
 * Draw one block-fading realization. The first path's delay is forced to 0.
 * Gains are jointly complex Gaussian with the configured covariance. In
 * integer-Doppler mode, (delay, Doppler) pairs are kept distinct so paths
 * never merge into one effective tap.
 */
ChannelRealization sample_channel(const ChannelSampling& cfg, Rng& rng);

/**
 * Pass a prefixed frame through the channel, sample-wise:
 *   r[n] = sum_i h_i * exp(-j*(2*pi/N)*nu_i*(n - cpp_len)) * s[n - tau_i],
 * with s[k] = 0 for k < 0. The Doppler phase is referenced to the first
 * post-prefix sample so the result matches the matrix form exactly.
 * No noise is added. Errors if any delay exceeds cpp_len.
 */
TimeSignal apply_time_domain(const TimeSignal& frame, const ChannelRealization& chan,
                             const AfdmParams& params);

struct EffectiveChannel {
    CMat time_domain;  // N x N matrix acting on the prefix-stripped frame
    CMat daft_domain;  // A * time_domain * A^H
};

/// Dense effective matrices for one realization.
EffectiveChannel effective_matrix(const ChannelRealization& chan,
                                  const DaftTransform& daft);

/// Prefix wrap phase G_i(n) for one path (1 for n >= delay).
cplx cpp_wrap_phase(int n, int delay, const AfdmParams& params);

}  // namespace afdmiq
