#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "wlab/prime_engine.hpp"

namespace wlab {

/// Coefficient level: a finite m >= 1, or the m -> infinity limit in which
/// w_m(n) becomes the Liouville sign lambda(n).
class Level {
public:
    static Level finite(std::uint64_t m);
    static Level lambda() { return Level{}; }

    bool is_lambda() const noexcept { return !m_.has_value(); }
    /// Throws StateError for the lambda level.
    std::uint64_t m() const;
    /// "inf" for lambda, otherwise the decimal value of m.
    std::string to_string() const;
    /// Parses "inf", "lambda" or a positive integer. Throws DomainError.
    static Level parse(const std::string& text);

    friend bool operator==(const Level&, const Level&) = default;

private:
    Level() = default;
    explicit Level(std::uint64_t m) : m_(m) {}
    std::optional<std::uint64_t> m_;
};

/// theta_m(n) = parity * pi + (pi / (m G)) * r, kept symbolic.
/// parity is 1 exactly when lambda(n) = -1; r is the G-free sum of
/// psi_fraction over the prime powers of n, always in lowest terms.
struct ExactAngle {
    bool parity = false;
    mpq_class r = 0;

    /// Angle of a product of coprime integers.
    ExactAngle& operator+=(const ExactAngle& other);
    friend ExactAngle operator+(ExactAngle a, const ExactAngle& b) { return a += b; }
    friend bool operator==(const ExactAngle& a, const ExactAngle& b) {
        return a.parity == b.parity && a.r == b.r;
    }
    /// Orders by parity, then r.
    friend bool operator<(const ExactAngle& a, const ExactAngle& b) {
        if (a.parity != b.parity) return !a.parity;
        return cmp(a.r, b.r) < 0;
    }
};

using UnitComplex = std::complex<double>;

enum class Sector { Even, Odd };

struct SectorLabel {
    Sector tag = Sector::Even;
    double half_width = 0.0;  // pi / m
};

/// (p^k - (p-1)^k) / p^(k+2), exact. Throws DomainError for k = 0 or p < 2.
mpq_class psi_fraction(std::uint64_t p, std::uint32_t k);

/// Same quantity in double precision, -expm1(k log1p(-1/p)) / p^2.
double psi_fraction_float(std::uint64_t p, std::uint32_t k);

/// psi_m(p^k) = (pi / (m G)) * psi_fraction(p, k), radians.
double psi_m(std::uint64_t p, std::uint32_t k, std::uint64_t m, double G);

/// (-1)^Omega(n); +1 for the empty factorization.
int liouville(const Factorization& f);

ExactAngle exact_theta(const Factorization& f);

/// parity * pi + (pi / (m G)) * r in doubles.
double theta_float(const Factorization& f, std::uint64_t m, double G);

/// Same formula from a precomputed float kernel r.
inline double theta_from_kernel(bool parity, double r, std::uint64_t m, double G) {
    constexpr double kPi = 3.14159265358979323846;
    return (parity ? kPi : 0.0) + kPi / (static_cast<double>(m) * G) * r;
}

/// e^(i theta_m(n)) using canonical_G(); exactly +-1 at the lambda level.
UnitComplex w_value(const Factorization& f, Level level);
UnitComplex w_value(const Factorization& f, std::uint64_t m);

SectorLabel sector_of(const ExactAngle& angle, std::uint64_t m);

/// Outcome of checking theta_m(n) in [0, pi/m) u (pi, pi + pi/m).
struct SectorCheck {
    bool in_sector = false;
    /// True when the float value fell inside the guard band and the verdict
    /// came from the exact path.
    bool escalated = false;
};

inline constexpr double kSectorGuard = 1e-12;

/// Float test with a guard band; inside the band the exact certificate
/// r < sum_{p | n} p^-2 (< G) and r > 0 decides.
SectorCheck check_sector(const Factorization& f, std::uint64_t m, double G);

struct DuplicateGroup {
    ExactAngle angle;
    std::vector<std::uint64_t> members;
};

struct InjectivityReport {
    std::uint64_t N = 0;
    std::vector<DuplicateGroup> duplicates;
};

/// Groups 1..N by exact (parity, r). Throws RangeError when N exceeds the
/// sieve or 10^6.
InjectivityReport injectivity_scan(std::uint64_t N, const SieveTable& sieve);

/// Float kernel (parity, r) for every n <= N, built once from the sieve by
/// r(n) = r(n / p^k) + psi_fraction_float(p, k) with p = spf(n).
class CoefficientTable {
public:
    CoefficientTable(const SieveTable& sieve, std::uint64_t N);

    std::uint64_t size() const noexcept { return N_; }
    double r(std::uint64_t n) const { return r_[n]; }
    bool parity(std::uint64_t n) const { return parity_[n] != 0; }
    int lambda(std::uint64_t n) const { return parity_[n] ? -1 : 1; }
    double theta(std::uint64_t n, std::uint64_t m, double G) const {
        return theta_from_kernel(parity(n), r_[n], m, G);
    }
    /// w_level(n) with the table's G.
    UnitComplex w(std::uint64_t n, const Level& level) const;
    double G() const noexcept { return G_; }

private:
    std::uint64_t N_;
    double G_;
    std::vector<double> r_;
    std::vector<std::uint8_t> parity_;
};

}  // namespace wlab
