#include "wlab/w_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wlab/errors.hpp"

namespace wlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kInjectivityCap = 1'000'000;

mpz_class pow_ui(std::uint64_t base, std::uint32_t e) {
    mpz_class out;
    mpz_class b;
    mpz_set_ui(b.get_mpz_t(), base);
    mpz_pow_ui(out.get_mpz_t(), b.get_mpz_t(), e);
    return out;
}

}  // namespace

Level Level::finite(std::uint64_t m) {
    if (m == 0) throw DomainError("level m must be >= 1");
    return Level(m);
}

std::uint64_t Level::m() const {
    if (!m_) throw StateError("lambda level has no finite m");
    return *m_;
}

std::string Level::to_string() const { return m_ ? std::to_string(*m_) : "inf"; }

Level Level::parse(const std::string& text) {
    if (text == "inf" || text == "lambda" || text == "λ") return lambda();
    std::size_t used = 0;
    unsigned long long m = 0;
    try {
        m = std::stoull(text, &used);
    } catch (const std::exception&) {
        throw DomainError("level: cannot parse '" + text + "'");
    }
    if (used != text.size() || text.front() == '-')
        throw DomainError("level: cannot parse '" + text + "'");
    return finite(m);
}

ExactAngle& ExactAngle::operator+=(const ExactAngle& other) {
    parity = parity != other.parity;
    r += other.r;
    return *this;
}

mpq_class psi_fraction(std::uint64_t p, std::uint32_t k) {
    if (k == 0) throw DomainError("psi_fraction: exponent must be >= 1");
    if (p < 2) throw DomainError("psi_fraction: p must be prime");
    mpq_class q(pow_ui(p, k) - pow_ui(p - 1, k), pow_ui(p, k + 2));
    q.canonicalize();
    return q;
}

double psi_fraction_float(std::uint64_t p, std::uint32_t k) {
    if (k == 0) throw DomainError("psi_fraction: exponent must be >= 1");
    if (p < 2) throw DomainError("psi_fraction: p must be prime");
    const double pd = static_cast<double>(p);
    return -std::expm1(static_cast<double>(k) * std::log1p(-1.0 / pd)) / (pd * pd);
}

double psi_m(std::uint64_t p, std::uint32_t k, std::uint64_t m, double G) {
    if (m == 0) throw DomainError("psi_m: level m must be >= 1");
    return kPi / (static_cast<double>(m) * G) * psi_fraction_float(p, k);
}

int liouville(const Factorization& f) { return (f.big_omega() % 2 == 0) ? 1 : -1; }

namespace {

// sum of psi_fraction over factors[lo, hi) as an unreduced num/den pair.
void psi_sum(const std::vector<PrimePower>& factors, std::size_t lo, std::size_t hi,
             mpz_class& num, mpz_class& den) {
    if (hi - lo == 1) {
        const auto [p, k] = factors[lo];
        if (k == 0) throw DomainError("psi_fraction: exponent must be >= 1");
        if (p < 2) throw DomainError("psi_fraction: p must be prime");
        num = pow_ui(p, k) - pow_ui(p - 1, k);
        den = pow_ui(p, k + 2);
        return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    mpz_class n2, d2;
    psi_sum(factors, lo, mid, num, den);
    psi_sum(factors, mid, hi, n2, d2);
    num = num * d2 + n2 * den;
    den *= d2;
}

}  // namespace

ExactAngle exact_theta(const Factorization& f) {
    // Binary splitting and one final reduction: witnesses carry hundreds of
    // prime powers with large exponents.
    ExactAngle angle;
    if (f.factors.empty()) return angle;
    mpz_class num, den;
    psi_sum(f.factors, 0, f.factors.size(), num, den);
    angle.r = mpq_class(num, den);
    angle.r.canonicalize();
    for (const auto& pk : f.factors)
        if (pk.k % 2 == 1) angle.parity = !angle.parity;
    return angle;
}

double theta_float(const Factorization& f, std::uint64_t m, double G) {
    if (m == 0) throw DomainError("theta_float: level m must be >= 1");
    double r = 0.0;
    bool parity = false;
    for (const auto& [p, k] : f.factors) {
        r += psi_fraction_float(p, k);
        parity = parity != (k % 2 == 1);
    }
    return theta_from_kernel(parity, r, m, G);
}

UnitComplex w_value(const Factorization& f, Level level) {
    if (level.is_lambda()) return {static_cast<double>(liouville(f)), 0.0};
    return std::polar(1.0, theta_float(f, level.m(), canonical_G()));
}

UnitComplex w_value(const Factorization& f, std::uint64_t m) {
    return w_value(f, Level::finite(m));
}

SectorLabel sector_of(const ExactAngle& angle, std::uint64_t m) {
    if (m == 0) throw DomainError("sector_of: level m must be >= 1");
    return {angle.parity ? Sector::Odd : Sector::Even, kPi / static_cast<double>(m)};
}

SectorCheck check_sector(const Factorization& f, std::uint64_t m, double G) {
    if (m == 0) throw DomainError("check_sector: level m must be >= 1");
    const double theta = theta_float(f, m, G);
    const bool parity = liouville(f) == -1;
    const double base = parity ? kPi : 0.0;
    const double width = kPi / static_cast<double>(m);
    const double offset = theta - base;

    const bool near_upper = offset >= width - kSectorGuard;
    // Odd sector is open at pi; even sector includes 0 (n = 1 only).
    const bool near_lower = parity ? offset <= kSectorGuard : offset < 0.0;
    if (!near_upper && !near_lower) return {true, false};

    // Exact path. r < sum_{p|n} p^-2 <= sum_{p <= max p} p^-2 < G, so
    // r < sum_{p|n} p^-2 certifies the upper edge for every m.
    const ExactAngle exact = exact_theta(f);
    mpq_class cap = 0;
    for (const auto& pk : f.factors) cap += mpq_class(1, pow_ui(pk.p, 2));
    bool ok = cmp(exact.r, cap) < 0 || f.factors.empty();
    if (parity)
        ok = ok && sgn(exact.r) > 0;
    else
        ok = ok && sgn(exact.r) >= 0;
    return {ok, true};
}

InjectivityReport injectivity_scan(std::uint64_t N, const SieveTable& sieve) {
    if (N > kInjectivityCap) throw RangeError("injectivity_scan: N must be <= 10^6");
    if (N > sieve.limit()) throw RangeError("injectivity_scan: N exceeds sieve limit");
    InjectivityReport report;
    report.N = N;
    if (N == 0) return report;

    std::vector<ExactAngle> angles(static_cast<std::size_t>(N) + 1);
    for (std::uint64_t n = 1; n <= N; ++n) angles[n] = exact_theta(sieve.factorize(n));

    std::vector<std::uint64_t> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), std::uint64_t{1});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint64_t a, std::uint64_t b) { return angles[a] < angles[b]; });

    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i + 1;
        while (j < order.size() && angles[order[j]] == angles[order[i]]) ++j;
        if (j - i > 1) {
            DuplicateGroup group{angles[order[i]], {}};
            for (std::size_t t = i; t < j; ++t) group.members.push_back(order[t]);
            std::sort(group.members.begin(), group.members.end());
            report.duplicates.push_back(std::move(group));
        }
        i = j;
    }
    return report;
}

CoefficientTable::CoefficientTable(const SieveTable& sieve, std::uint64_t N)
    : N_(N), G_(canonical_G()) {
    if (N > sieve.limit()) throw RangeError("coefficient table: N exceeds sieve limit");
    r_.assign(static_cast<std::size_t>(N) + 1, 0.0);
    parity_.assign(static_cast<std::size_t>(N) + 1, 0);
    for (std::uint64_t n = 2; n <= N; ++n) {
        const std::uint64_t p = sieve.spf(n);
        std::uint64_t rest = n;
        std::uint32_t k = 0;
        do {
            rest /= p;
            ++k;
        } while (rest % p == 0);
        r_[n] = r_[rest] + psi_fraction_float(p, k);
        parity_[n] = static_cast<std::uint8_t>(parity_[rest] ^ (k & 1u));
    }
}

UnitComplex CoefficientTable::w(std::uint64_t n, const Level& level) const {
    if (level.is_lambda()) return {parity_[n] ? -1.0 : 1.0, 0.0};
    return std::polar(1.0, theta(n, level.m(), G_));
}

}  // namespace wlab
