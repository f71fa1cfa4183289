// Shared helpers for the unit suites.
#pragma once

#include <cmath>

#include "afdmiq/rng.hpp"
#include "afdmiq/types.hpp"

namespace testutil {

inline double max_abs(const afdmiq::CMat& m) { return m.cwiseAbs().maxCoeff(); }
inline double max_abs(const afdmiq::CVec& v) { return v.cwiseAbs().maxCoeff(); }

inline afdmiq::CVec random_cvec(afdmiq::Rng& rng, Eigen::Index n) {
    return rng.complex_normal_vector(n, 1.0);
}

// Gaussian tail probability, for oracle comparisons against erfc.
inline double q_func(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace testutil
