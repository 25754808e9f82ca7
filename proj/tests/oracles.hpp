#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check: primality and Omega come from trial division, zeta
// from plain Euler-Maclaurin in long double, fractions from GMP directly.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <gmpxx.h>

namespace oracle {

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

inline std::uint64_t smallest_factor(std::uint64_t n) {
    if (n % 2 == 0) return 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return d;
    return n;
}

inline int big_omega(std::uint64_t n) {
    int count = 0;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        while (n % d == 0) {
            n /= d;
            ++count;
        }
    if (n > 1) ++count;
    return count;
}

inline int liouville(std::uint64_t n) { return big_omega(n) % 2 == 0 ? 1 : -1; }

// zeta(s) for real s > 1: sum_{n<N} n^-s + N^(1-s)/(s-1) + N^-s/2 + two
// Bernoulli corrections, N = 1000.
inline long double zeta_em(long double s) {
    const long double N = 1000.0L;
    long double sum = 0.0L;
    for (long double n = N - 1; n >= 1.0L; n -= 1.0L) sum += std::pow(n, -s);
    sum += std::pow(N, 1.0L - s) / (s - 1.0L) + std::pow(N, -s) / 2.0L;
    sum += s / 12.0L * std::pow(N, -s - 1.0L);
    sum -= s * (s + 1.0L) * (s + 2.0L) / 720.0L * std::pow(N, -s - 3.0L);
    return sum;
}

// P(2) = sum_{k <= 40} mu(k)/k ln zeta(2k).
inline long double prime_zeta_2() {
    auto mu = [](int k) {
        int r = 1;
        for (int p = 2; p * p <= k; ++p) {
            if (k % p) continue;
            k /= p;
            if (k % p == 0) return 0;
            r = -r;
        }
        return k > 1 ? -r : r;
    };
    long double sum = 0.0L;
    for (int k = 1; k <= 40; ++k)
        if (int m = mu(k)) sum += static_cast<long double>(m) / k * std::log(zeta_em(2.0L * k));
    return sum;
}

// k-th partial sum of the geometric series a + a r + ... with a = 1/p^3,
// r = (p-1)/p.
inline mpq_class geometric_partial(unsigned long p, unsigned k) {
    const mpq_class a(1, p * p * p);
    const mpq_class r(p - 1, p);
    mpq_class term = a, sum = 0;
    for (unsigned i = 0; i < k; ++i) {
        sum += term;
        term *= r;
    }
    return sum;
}

}  // namespace oracle
