#include "wlab/prime_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wlab/errors.hpp"
#include "wlab/zeta.hpp"

namespace wlab {

std::optional<std::uint64_t> Factorization::value() const {
    std::uint64_t n = 1;
    for (const auto& [p, k] : factors) {
        for (std::uint32_t i = 0; i < k; ++i) {
            if (n > std::numeric_limits<std::uint64_t>::max() / p) return std::nullopt;
            n *= p;
        }
    }
    return n;
}

std::uint64_t Factorization::big_omega() const {
    std::uint64_t total = 0;
    for (const auto& pk : factors) total += pk.k;
    return total;
}

bool Factorization::is_canonical() const {
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (factors[i].k == 0 || factors[i].p < 2) return false;
        if (i > 0 && factors[i - 1].p >= factors[i].p) return false;
    }
    return true;
}

SieveTable::SieveTable(std::uint64_t limit, std::size_t memory_budget) : limit_(limit) {
    if (limit < 2) throw SizingError("build_sieve: limit must be >= 2");
    if (limit > kMaxSieveLimit)
        throw SizingError("build_sieve: limit exceeds 2^32 - 1 (32-bit spf entries)");
    const std::size_t bytes = static_cast<std::size_t>(limit + 1) * sizeof(std::uint32_t);
    if (bytes > memory_budget)
        throw SizingError("build_sieve: limit " + std::to_string(limit) + " needs " +
                          std::to_string(bytes) + " bytes, budget is " +
                          std::to_string(memory_budget));

    // Linear sieve: every composite is struck exactly once, by its spf.
    spf_.assign(static_cast<std::size_t>(limit + 1), 0);
    std::vector<std::uint32_t> primes;
    primes.reserve(static_cast<std::size_t>(1.26 * static_cast<double>(limit) /
                                            std::log(static_cast<double>(limit))) +
                   16);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (spf_[i] == 0) {
            spf_[i] = static_cast<std::uint32_t>(i);
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        const std::uint32_t lp = spf_[i];
        for (const std::uint32_t p : primes) {
            const std::uint64_t j = i * p;
            if (p > lp || j > limit) break;
            spf_[j] = p;
        }
    }
}

SieveTable SieveTable::from_entries(std::vector<std::uint32_t> spf) {
    if (spf.size() < 3) throw SizingError("sieve table: needs entries for 0..2 at least");
    SieveTable table;
    table.limit_ = spf.size() - 1;
    table.spf_ = std::move(spf);
    return table;
}

Factorization SieveTable::factorize(std::uint64_t n) const {
    if (n == 0 || n > limit_)
        throw RangeError("factorize: " + std::to_string(n) + " outside [1, " +
                         std::to_string(limit_) + "]");
    Factorization f;
    while (n > 1) {
        const std::uint32_t p = spf_[n];
        std::uint32_t k = 0;
        do {
            n /= p;
            ++k;
        } while (n % p == 0);
        f.factors.push_back({p, k});
    }
    return f;
}

bool SieveTable::validate() const {
    if (spf_.size() != limit_ + 1) return false;
    for (std::uint64_t n = 2; n <= limit_; ++n) {
        const std::uint32_t p = spf_[n];
        if (p < 2 || p > n || n % p != 0 || spf_[p] != p) return false;
    }
    return true;
}

void for_each_prime(std::uint64_t limit, const std::function<bool(std::uint64_t)>& visit) {
    if (limit < 2) return;
    if (!visit(2)) return;
    if (limit < 3) return;

    const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(limit))) + 1;
    std::vector<char> small(static_cast<std::size_t>(root + 1), 1);
    std::vector<std::uint64_t> base;
    for (std::uint64_t i = 3; i <= root; i += 2) {
        if (!small[i]) continue;
        base.push_back(i);
        for (std::uint64_t j = i * i; j <= root; j += 2 * i) small[j] = 0;
    }

    // Odd-only segments: slot i of a segment starting at `lo` is lo + 2i.
    constexpr std::uint64_t kSlots = 1u << 18;
    std::vector<char> seg(kSlots);
    std::vector<std::uint64_t> next(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) next[i] = base[i] * base[i];

    for (std::uint64_t lo = 3; lo <= limit; lo += 2 * kSlots) {
        const std::uint64_t hi = std::min(limit, lo + 2 * kSlots - 1);
        std::fill(seg.begin(), seg.end(), 1);
        for (std::size_t i = 0; i < base.size(); ++i) {
            const std::uint64_t p = base[i];
            if (p * p > hi) break;
            std::uint64_t j = next[i];
            for (; j <= hi; j += 2 * p) seg[(j - lo) / 2] = 0;
            next[i] = j;
        }
        for (std::uint64_t n = lo; n <= hi; n += 2)
            if (seg[(n - lo) / 2] && !visit(n)) return;
    }
}

std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> out;
    if (hi < 2 || lo > hi) return out;
    lo = std::max<std::uint64_t>(lo, 2);
    const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(hi))) + 1;
    std::vector<std::uint64_t> base;
    for_each_prime(root, [&](std::uint64_t p) {
        base.push_back(p);
        return true;
    });
    // Cache-sized windows over [lo, hi].
    constexpr std::uint64_t kWindow = 1u << 18;
    std::vector<char> mark(kWindow);
    for (std::uint64_t wlo = lo;; wlo += kWindow) {
        const std::uint64_t whi = std::min(hi, wlo + kWindow - 1);
        std::fill(mark.begin(), mark.end(), 1);
        for (const std::uint64_t p : base) {
            if (p * p > whi) break;
            const std::uint64_t start = std::max(p * p, (wlo + p - 1) / p * p);
            for (std::uint64_t j = start; j <= whi; j += p) mark[j - wlo] = 0;
        }
        for (std::uint64_t n = wlo; n <= whi; ++n)
            if (mark[n - wlo]) out.push_back(n);
        if (whi == hi) break;
    }
    return out;
}

long double sum_inverse_prime_squares(std::uint64_t limit) {
    // Neumaier-compensated, increasing p.
    long double sum = 0.0L;
    long double comp = 0.0L;
    for_each_prime(limit, [&](std::uint64_t p) {
        const long double pl = static_cast<long double>(p);
        const long double term = 1.0L / (pl * pl);
        const long double t = sum + term;
        if (std::fabs(sum) >= std::fabs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
        return true;
    });
    return sum + comp;
}

double prime_square_tail_bound(double x) {
    if (x < 17.0) throw DomainError("prime_square_tail_bound: requires x >= 17");
    return 2.51012 / (x * std::log(x));
}

std::string_view to_string(GMethod method) {
    switch (method) {
        case GMethod::DirectTail:
            return "direct-tail";
        case GMethod::MoebiusLogZeta:
            return "moebius-log-zeta";
    }
    return "unknown";
}

namespace {

int moebius(int k) {
    int result = 1;
    for (int p = 2; p * p <= k; ++p) {
        if (k % p != 0) continue;
        k /= p;
        if (k % p == 0) return 0;
        result = -result;
    }
    if (k > 1) result = -result;
    return result;
}

// Upper bound on sum_{k > K} (zeta(2k) - 1) / k, using zeta(2k) - 1 <= 2 * 4^-k.
double moebius_tail_bound(int K) { return 2.0 / (3.0 * (K + 1)) * std::pow(4.0, -K); }

constexpr int kMaxMoebiusTerms = 40;
constexpr double kMoebiusRounding = 2e-16;

}  // namespace

PrimeZetaValue compute_G_direct(std::uint64_t prime_cutoff) {
    if (prime_cutoff < 17) throw DomainError("compute_G: direct cutoff must be >= 17");
    const long double sum = sum_inverse_prime_squares(prime_cutoff);
    return {static_cast<double>(sum),
            prime_square_tail_bound(static_cast<double>(prime_cutoff)) + 1e-16, GMethod::DirectTail,
            prime_cutoff};
}

PrimeZetaValue compute_G(GMethod method, double precision_target) {
    if (!(precision_target > 0.0)) throw PrecisionError("compute_G: precision target must be > 0");
    switch (method) {
        case GMethod::DirectTail: {
            if (precision_target < 1e-7)
                throw PrecisionError("compute_G: direct-tail cannot reach precision below 1e-7");
            // Smallest power-of-two cutoff whose rigorous tail bound meets the target.
            std::uint64_t cutoff = 32;
            while (prime_square_tail_bound(static_cast<double>(cutoff)) + 1e-16 > precision_target)
                cutoff *= 2;
            return compute_G_direct(cutoff);
        }
        case GMethod::MoebiusLogZeta: {
            if (precision_target < 1e-14)
                throw PrecisionError(
                    "compute_G: moebius-log-zeta cannot reach precision below 1e-14");
            const int terms = kMaxMoebiusTerms;
            // P(2) = sum_k mu(k)/k ln zeta(2k)
            long double sum = 0.0L;
            for (int k = 1; k <= terms; ++k) {
                const int mu = moebius(k);
                if (mu == 0) continue;
                const long double z = zeta_real(2.0L * k);
                sum += static_cast<long double>(mu) / k * std::log1p(z - 1.0L);
            }
            return {static_cast<double>(sum), moebius_tail_bound(terms) + kMoebiusRounding,
                    GMethod::MoebiusLogZeta, static_cast<std::uint64_t>(terms)};
        }
    }
    throw DomainError("compute_G: unknown method");
}

double canonical_G() {
    static const double g = compute_G(GMethod::MoebiusLogZeta, 1e-12).value;
    return g;
}

}  // namespace wlab
