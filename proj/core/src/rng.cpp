#include "afdmiq/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace afdmiq {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559005768;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t point_index,
                            std::uint64_t frame_index) {
    std::uint64_t s = seed;
    std::uint64_t id = splitmix64(s);
    s ^= 0xd1342543de82ef95ull * (point_index + 1);
    id ^= splitmix64(s);
    s ^= 0xaf251af3b0f025b5ull * (frame_index + 1);
    id ^= splitmix64(s);
    return id;
}

Rng::Rng(std::uint64_t stream_id) : engine_(stream_id) {}

Rng::Rng(std::uint64_t seed, std::uint64_t point_index, std::uint64_t frame_index)
    : Rng(derive_stream(seed, point_index, frame_index)) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
    // 53 high bits -> [0, 1) with full double resolution.
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("Rng::uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    // Modulo bias is < 2^-60 for the spans used here (delays, Doppler bins).
    return lo + static_cast<std::int64_t>(next_u64() % span);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

cplx Rng::complex_normal(double variance) {
    const double s = std::sqrt(variance * 0.5);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

CVec Rng::complex_normal_vector(Eigen::Index n, double variance) {
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = complex_normal(variance);
    return v;
}

}  // namespace afdmiq
