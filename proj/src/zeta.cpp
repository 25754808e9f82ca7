#include "wlab/zeta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "wlab/errors.hpp"

namespace wlab {

namespace {

using cld = std::complex<long double>;

// n^-s for integer n >= 1.
cld inverse_power(long double n, cld s) {
    const long double log_n = std::log(n);
    const long double mag = std::exp(-s.real() * log_n);
    const long double phase = -s.imag() * log_n;
    return {mag * std::cos(phase), mag * std::sin(phase)};
}

struct EtaResult {
    cld zeta;
    long double error_bound;
};

// Borwein (1991), algorithm 2: eta(s) = -1/d_n sum_{k<n} (-1)^k (d_k - d_n) (k+1)^-s.
EtaResult borwein_zeta(cld s) {
    const long double t = std::abs(s.imag());
    const cld one_minus = cld(1.0L) - std::pow(cld(2.0L), cld(1.0L) - s);
    const long double den = std::abs(one_minus);
    const long double rate = std::log(3.0L + std::sqrt(8.0L));
    const long double want = std::log(3.0L * (1.0L + 2.0L * t) / den) +
                             std::numbers::pi_v<long double> * t / 2.0L + std::log(1e19L);
    const int n = std::clamp(static_cast<int>(std::ceil(want / rate)), 8, 400);

    // d_k = sum_{i<=k} term_i, term_i = n (n+i-1)! 4^i / ((n-i)! (2i)!)
    std::vector<long double> d(static_cast<std::size_t>(n) + 1);
    long double term = 1.0L;
    long double acc = 1.0L;
    d[0] = acc;
    for (int i = 1; i <= n; ++i) {
        term *= 4.0L * static_cast<long double>(n + i - 1) * static_cast<long double>(n - i + 1) /
                (static_cast<long double>(2 * i) * static_cast<long double>(2 * i - 1));
        acc += term;
        d[static_cast<std::size_t>(i)] = acc;
    }
    const long double dn = d[static_cast<std::size_t>(n)];

    cld sum = 0.0L;
    for (int k = 0; k < n; ++k) {
        const long double coeff = (d[static_cast<std::size_t>(k)] - dn) / dn;
        const cld contrib = coeff * inverse_power(static_cast<long double>(k + 1), s);
        sum += (k % 2 == 0) ? contrib : -contrib;
    }
    const cld eta = -sum;

    const long double truncation = 3.0L / std::pow(3.0L + std::sqrt(8.0L), n) * (1.0L + 2.0L * t) *
                                   std::exp(std::numbers::pi_v<long double> * t / 2.0L) / den;
    const long double rounding =
        static_cast<long double>(n) * 4.0L * std::numeric_limits<long double>::epsilon() / den;
    return {eta / one_minus, truncation + rounding};
}

// B_{2k} / (2k)! for k = 1..13.
constexpr std::array<long double, 13> kBernoulliOverFactorial = {
    1.0L / 6.0L / 2.0L,
    -1.0L / 30.0L / 24.0L,
    1.0L / 42.0L / 720.0L,
    -1.0L / 30.0L / 40320.0L,
    5.0L / 66.0L / 3628800.0L,
    -691.0L / 2730.0L / 479001600.0L,
    7.0L / 6.0L / 87178291200.0L,
    -3617.0L / 510.0L / 20922789888000.0L,
    43867.0L / 798.0L / 6402373705728000.0L,
    -174611.0L / 330.0L / 2432902008176640000.0L,
    854513.0L / 138.0L / 1124000727777607680000.0L,
    -236364091.0L / 2730.0L / 620448401733239439360000.0L,
    8553103.0L / 6.0L / 403291461126605635584000000.0L,
};

}  // namespace

std::string_view to_string(ZetaMethod method) {
    switch (method) {
        case ZetaMethod::EtaAcceleration:
            return "eta-acceleration";
        case ZetaMethod::EulerMaclaurin:
            return "euler-maclaurin";
    }
    return "unknown";
}

ZetaValue zeta_eta(std::complex<double> s) {
    if (!(s.real() > 1.0)) throw DomainError("zeta: requires Re(s) > 1");
    const auto r = borwein_zeta(cld(s.real(), s.imag()));
    return {std::complex<double>(static_cast<double>(r.zeta.real()),
                                 static_cast<double>(r.zeta.imag())),
            static_cast<double>(r.error_bound) + 4.0 * std::numeric_limits<double>::epsilon() *
                                                     static_cast<double>(std::abs(r.zeta)),
            ZetaMethod::EtaAcceleration};
}

ZetaValue zeta_euler_maclaurin(std::complex<double> sd) {
    if (!(sd.real() > 1.0)) throw DomainError("zeta: requires Re(s) > 1");
    const cld s(sd.real(), sd.imag());
    constexpr int kTerms = 12;
    const long double big_n = std::max(16.0L, std::ceil(std::abs(s.imag())) + 16.0L);

    cld sum = 0.0L;
    for (long double n = 1.0L; n < big_n; n += 1.0L) sum += inverse_power(n, s);
    const cld n_pow = inverse_power(big_n, s);  // N^-s
    sum += n_pow * big_n / (s - 1.0L);
    sum += n_pow / 2.0L;

    cld rising = s;               // s (s+1) ... (s+2k-2)
    cld n_shift = n_pow / big_n;  // N^(-s-2k+1)
    for (int k = 1; k <= kTerms; ++k) {
        sum += kBernoulliOverFactorial[static_cast<std::size_t>(k - 1)] * rising * n_shift;
        rising *= (s + static_cast<long double>(2 * k - 1)) * (s + static_cast<long double>(2 * k));
        n_shift /= big_n * big_n;
    }
    const cld next = kBernoulliOverFactorial[kTerms] * rising * n_shift;
    const long double fudge =
        std::abs(s + static_cast<long double>(2 * kTerms + 1)) / (s.real() + 2 * kTerms + 1);
    const double bound =
        static_cast<double>(std::abs(next) * fudge) +
        8.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(std::abs(sum));
    return {std::complex<double>(static_cast<double>(sum.real()), static_cast<double>(sum.imag())),
            bound, ZetaMethod::EulerMaclaurin};
}

ZetaValue zeta(std::complex<double> s) {
    if (!(s.real() > 1.0)) throw DomainError("zeta: requires Re(s) > 1");
    const auto one_minus = 1.0 - std::pow(std::complex<double>(2.0), 1.0 - s);
    if (std::abs(one_minus) < 0.1) return zeta_euler_maclaurin(s);
    return zeta_eta(s);
}

long double zeta_real(long double s) {
    if (!(s > 1.0L)) throw DomainError("zeta: requires s > 1");
    return borwein_zeta(cld(s, 0.0L)).zeta.real();
}

std::complex<double> zeta_ratio_ref(std::complex<double> s) {
    if (!(s.real() > 1.0)) throw DomainError("zeta_ratio_ref: requires Re(s) > 1");
    return zeta(2.0 * s).value / zeta(s).value;
}

}  // namespace wlab
