#include "afdmiq/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace afdmiq {

void AfdmParams::validate() const {
    if (n < 2) throw std::invalid_argument("AfdmParams: n must be >= 2");
    if (nu_max < 0 || zeta_nu < 0)
        throw std::invalid_argument("AfdmParams: Doppler budget must be >= 0");
    if (tau_max < 0 || tau_max >= n)
        throw std::invalid_argument("AfdmParams: tau_max must lie in [0, n)");
    if (cpp_len < tau_max || cpp_len >= n)
        throw std::invalid_argument(
            "AfdmParams: cpp_len must cover tau_max and stay below n");
    if (!std::isfinite(c1) || !std::isfinite(c2) || c1 < 0.0 || c2 < 0.0)
        throw std::invalid_argument("AfdmParams: chirp rates must be finite and >= 0");
}

ChirpRates derive_chirp_rates(int n, int nu_max, int zeta_nu,
                              std::optional<double> c2_override) {
    if (n < 2) throw std::invalid_argument("derive_chirp_rates: n must be >= 2");
    if (nu_max < 0 || zeta_nu < 0)
        throw std::invalid_argument("derive_chirp_rates: Doppler budget must be >= 0");
    ChirpRates r{};
    r.c1 = static_cast<double>(2 * (nu_max + zeta_nu) + 1) / (2.0 * n);
    r.c2 = 1.0 / (2.0 * static_cast<double>(n) * n);
    if (c2_override) {
        const double hi = 1.0 / (2.0 * n);
        if (!(*c2_override >= 0.0) || *c2_override >= hi)
            throw std::invalid_argument(
                "derive_chirp_rates: c2 override outside [0, 1/(2N)) for N=" +
                std::to_string(n));
        r.c2 = *c2_override;
    }
    return r;
}

AfdmParams make_afdm_params(int n, int nu_max, int tau_max, int zeta_nu,
                            std::optional<double> c2_override,
                            std::optional<int> cpp_len) {
    const ChirpRates rates = derive_chirp_rates(n, nu_max, zeta_nu, c2_override);
    AfdmParams p;
    p.n = n;
    p.c1 = rates.c1;
    p.c2 = rates.c2;
    p.nu_max = nu_max;
    p.tau_max = tau_max;
    p.zeta_nu = zeta_nu;
    p.cpp_len = cpp_len.value_or(tau_max);
    p.validate();
    return p;
}

AfdmParams make_ofdm_params(int n, int tau_max, std::optional<int> cpp_len) {
    AfdmParams p;
    p.n = n;
    p.c1 = 0.0;
    p.c2 = 0.0;
    p.nu_max = 0;
    p.tau_max = tau_max;
    p.zeta_nu = 0;
    p.cpp_len = cpp_len.value_or(tau_max);
    p.validate();
    return p;
}

}  // namespace afdmiq
