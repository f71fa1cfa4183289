// rng.hpp - Deterministic random streams for Monte Carlo frames.
//
// Every simulated frame owns an independent stream derived from
// (seed, point_index, frame_index), so frames can be computed in any order
// by any number of workers and still reproduce byte-identical results.
// Gaussian and uniform transforms are implemented here rather than taken
// from <random> distributions because those are implementation-defined and
// would break cross-toolchain reproducibility of pinned outputs.
#pragma once

#include <cstdint>
#include <random>

#include "afdmiq/types.hpp"

namespace afdmiq {

/// splitmix64 mixing step; also usable as a standalone scrambler.
std::uint64_t splitmix64(std::uint64_t& state);

/// Collapse (seed, point, frame) into one well-mixed 64-bit stream id.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t point_index,
                            std::uint64_t frame_index);

/**
 * Per-frame random source: an mt19937_64 engine seeded from a derived
 * stream id, with portable Box-Muller and integer transforms on top.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t stream_id);
    Rng(std::uint64_t seed, std::uint64_t point_index, std::uint64_t frame_index);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1).
    double uniform();

    /// Uniform integer in [lo, hi] (inclusive); requires lo <= hi.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Standard normal via Box-Muller (second value cached).
    double normal();

    /// Circularly symmetric complex Gaussian with E|z|^2 = variance.
    cplx complex_normal(double variance);

    /// Vector of i.i.d. CN(0, variance) samples.
    CVec complex_normal_vector(Eigen::Index n, double variance);

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace afdmiq
