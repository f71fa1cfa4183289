#include "afdmiq/transform.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "fft.hpp"

namespace afdmiq {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559005768;

// exp(-j*2*pi*c*k^2) evaluated with the quadratic argument reduced mod 1
// before the trig call; for dyadic c (the rule-derived rates on power-of-two
// N) the reduction is exact in double precision.
cplx chirp_phase(double c, double k) {
    const double frac = std::fmod(c * k * k, 1.0);
    const double a = -kTwoPi * frac;
    return {std::cos(a), std::sin(a)};
}

CVec chirp_vector(double c, int n) {
    CVec v(n);
    for (int k = 0; k < n; ++k) v[k] = chirp_phase(c, static_cast<double>(k));
    return v;
}

}  // namespace

struct DaftTransform::MatrixCache {
    std::once_flag once;
    CMat a;
};

DaftTransform::DaftTransform(const AfdmParams& params)
    : params_(params), cache_(std::make_unique<MatrixCache>()) {
    params_.validate();
    chirp1_ = chirp_vector(params_.c1, params_.n);
    chirp2_ = chirp_vector(params_.c2, params_.n);
    if (params_.pow2()) fft_ = std::make_unique<detail::Radix2Fft>(params_.n);
}

DaftTransform::~DaftTransform() = default;
DaftTransform::DaftTransform(DaftTransform&&) noexcept = default;
DaftTransform& DaftTransform::operator=(DaftTransform&&) noexcept = default;

const CMat& DaftTransform::matrix() const {
    std::call_once(cache_->once, [this] {
        const int n = params_.n;
        CMat a(n, n);
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        for (int m = 0; m < n; ++m) {
            for (int k = 0; k < n; ++k) {
                const double frac =
                    std::fmod(static_cast<double>(m) * k / n, 1.0);
                const double arg = -kTwoPi * frac;
                a(m, k) = chirp2_[m] * (scale * cplx{std::cos(arg), std::sin(arg)}) *
                          chirp1_[k];
            }
        }
        cache_->a = std::move(a);
    });
    return cache_->a;
}

CVec DaftTransform::modulate(const CVec& x) const {
    if (x.size() != params_.n)
        throw std::invalid_argument("DaftTransform::modulate: length mismatch");
    if (!fft_) return matrix().adjoint() * x;
    const int n = params_.n;
    CVec s(n);
    for (int m = 0; m < n; ++m) s[m] = std::conj(chirp2_[m]) * x[m];
    fft_->run(s.data(), +1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k) s[k] = std::conj(chirp1_[k]) * (scale * s[k]);
    return s;
}

CVec DaftTransform::demodulate(const CVec& r) const {
    if (r.size() != params_.n)
        throw std::invalid_argument("DaftTransform::demodulate: length mismatch");
    if (!fft_) return matrix() * r;
    const int n = params_.n;
    CVec y(n);
    for (int k = 0; k < n; ++k) y[k] = chirp1_[k] * r[k];
    fft_->run(y.data(), -1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m) y[m] = chirp2_[m] * (scale * y[m]);
    return y;
}

CMat DaftTransform::demodulate_columns(const CMat& m) const {
    if (m.rows() != params_.n)
        throw std::invalid_argument("DaftTransform::demodulate_columns: row mismatch");
    CMat out(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        out.col(c) = demodulate(CVec(m.col(c)));
    return out;
}

CVec idaft(const CVec& x, const AfdmParams& params) {
    return DaftTransform(params).modulate(x);
}

CVec daft(const CVec& r, const AfdmParams& params) {
    return DaftTransform(params).demodulate(r);
}

CMat daft_matrix(const AfdmParams& params) {
    return DaftTransform(params).matrix();
}

TimeSignal add_cpp(const TimeSignal& frame, const AfdmParams& params) {
    if (frame.has_cpp)
        throw std::invalid_argument("add_cpp: frame already carries a prefix");
    if (frame.samples.size() != params.n)
        throw std::invalid_argument("add_cpp: frame length mismatch");
    const int n = params.n;
    const int l = params.cpp_len;
    TimeSignal out;
    out.has_cpp = true;
    out.samples.resize(l + n);
    for (int i = 0; i < l; ++i) {
        const double m = static_cast<double>(i - l);  // prefix index, -l..-1
        const double arg =
            static_cast<double>(n) * n + 2.0 * static_cast<double>(n) * m;
        const double frac = std::fmod(params.c1 * arg, 1.0);
        const double a = -kTwoPi * frac;
        out.samples[i] = frame.samples[n - l + i] * cplx{std::cos(a), std::sin(a)};
    }
    out.samples.tail(n) = frame.samples;
    return out;
}

TimeSignal remove_cpp(const TimeSignal& frame, const AfdmParams& params) {
    if (!frame.has_cpp)
        throw std::invalid_argument("remove_cpp: frame has no prefix");
    if (frame.samples.size() != params.n + params.cpp_len)
        throw std::invalid_argument("remove_cpp: frame length mismatch");
    TimeSignal out;
    out.has_cpp = false;
    out.samples = frame.samples.tail(params.n);
    return out;
}

}  // namespace afdmiq
