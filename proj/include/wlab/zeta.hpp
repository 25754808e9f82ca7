#pragma once

#include <complex>
#include <string_view>

namespace wlab {

enum class ZetaMethod { EtaAcceleration, EulerMaclaurin };

std::string_view to_string(ZetaMethod method);

struct ZetaValue {
    std::complex<double> value;
    double error_bound = 0.0;
    ZetaMethod method = ZetaMethod::EtaAcceleration;
};

/// Riemann zeta for Re(s) > 1 via the accelerated alternating (eta) series
/// of Borwein. Falls back to Euler-Maclaurin when 1 - 2^(1-s) is close to 0.
/// Throws DomainError for Re(s) <= 1.
ZetaValue zeta(std::complex<double> s);

/// Eta-acceleration only; `error_bound` is the Borwein a-priori bound.
ZetaValue zeta_eta(std::complex<double> s);

/// Euler-Maclaurin summation only. Independent of zeta_eta, used as the
/// secondary path and as a test oracle.
ZetaValue zeta_euler_maclaurin(std::complex<double> s);

/// Real zeta in extended precision, s > 1 (eta acceleration).
long double zeta_real(long double s);

/// zeta(2s) / zeta(s), the closed form of sum lambda(n) n^-s. Re(s) > 1 only.
std::complex<double> zeta_ratio_ref(std::complex<double> s);

}  // namespace wlab
