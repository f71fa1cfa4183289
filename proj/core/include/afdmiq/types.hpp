// types.hpp - Shared numeric types for the AFDM simulation core.
#pragma once

#include <complex>
#include <Eigen/Dense>

namespace afdmiq {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/**
 * A block of baseband time-domain samples.
 *
 * has_cpp distinguishes a bare N-sample frame from one carrying its
 * chirp-periodic prefix; operations that require one form or the other
 * check the flag instead of guessing from the length.
 */
struct TimeSignal {
    CVec samples;
    bool has_cpp = false;

    [[nodiscard]] Eigen::Index size() const { return samples.size(); }
};

}  // namespace afdmiq
