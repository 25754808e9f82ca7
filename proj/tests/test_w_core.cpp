#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wlab/errors.hpp"
#include "wlab/w_core.hpp"

using namespace wlab;

namespace {

const SieveTable& sieve() {
    static const SieveTable s(1'000'000);
    return s;
}

Factorization fac(std::uint64_t n) { return sieve().factorize(n); }

// Frozen from 50-digit evaluation with G = 0.4522474200410654985065.
constexpr double kPiOver8G = 0.868327964509042;
constexpr double k3PiOver16G = 1.302491946763563;
constexpr double kPiPlusPiOver8G = 4.009920618098835;
constexpr double kPiOver4G = 1.736655929018084;

}  // namespace

TEST_CASE("Level parsing and printing") {
    CHECK(Level::parse("inf").is_lambda());
    CHECK(Level::parse("lambda").is_lambda());
    CHECK(Level::parse("17").m() == 17);
    CHECK(Level::finite(3).to_string() == "3");
    CHECK(Level::lambda().to_string() == "inf");
    CHECK_THROWS_AS(Level::parse("0"), DomainError);
    CHECK_THROWS_AS(Level::parse("-4"), DomainError);
    CHECK_THROWS_AS(Level::parse("two"), DomainError);
    CHECK_THROWS_AS(Level::finite(0), DomainError);
    CHECK_THROWS_AS(Level::lambda().m(), StateError);
}

TEST_CASE("psi_fraction") {
    CHECK(psi_fraction(2, 1) == mpq_class(1, 8));
    CHECK(psi_fraction(2, 2) == mpq_class(3, 16));
    CHECK(psi_fraction(3, 1) == mpq_class(1, 27));
    CHECK_THROWS_AS(psi_fraction(2, 0), DomainError);
    CHECK_THROWS_AS(psi_fraction(1, 3), DomainError);
    CHECK(psi_fraction_float(2, 2) == doctest::Approx(3.0 / 16).epsilon(1e-16));
    CHECK(psi_fraction_float(1'000'003, 1) ==
          doctest::Approx(psi_fraction(1'000'003, 1).get_d()).epsilon(1e-15));
}

TEST_CASE("psi_fraction equals the geometric partial sum") {
    for (unsigned long p = 2; p <= 100; ++p) {
        if (!oracle::is_prime(p)) continue;
        for (unsigned k = 1; k <= 20; ++k)
            REQUIRE(psi_fraction(p, k) == oracle::geometric_partial(p, k));
    }
}

TEST_CASE("psi_m") {
    const double G = canonical_G();
    CHECK(psi_m(2, 1, 1, G) == doctest::Approx(kPiOver8G).epsilon(1e-14));
    CHECK(psi_m(2, 1, 2, G) == psi_m(2, 1, 1, G) / 2);
    CHECK(std::fabs(psi_m(2, 60, 1, G) - kPiOver4G) < 1e-12);
    CHECK_THROWS_AS(psi_m(2, 1, 0, G), DomainError);
}

TEST_CASE("liouville") {
    CHECK(liouville(fac(1)) == 1);
    CHECK(liouville(fac(12)) == -1);
    long long total = 0;
    for (std::uint64_t n = 1; n <= 1'000'000; ++n) total += liouville(fac(n));
    // Frozen from oracle::liouville (trial-division Omega).
    CHECK(total == -530);
    for (std::uint64_t n = 1; n <= 20'000; ++n) REQUIRE(liouville(fac(n)) == oracle::liouville(n));
}

TEST_CASE("exact_theta") {
    const auto one = exact_theta(fac(1));
    CHECK_FALSE(one.parity);
    CHECK(one.r == 0);
    const auto two = exact_theta(fac(2));
    CHECK(two.parity);
    CHECK(two.r == mpq_class(1, 8));
    const auto six = exact_theta(fac(6));
    CHECK_FALSE(six.parity);
    CHECK(six.r == mpq_class(35, 216));
    CHECK(exact_theta(fac(2)) + exact_theta(fac(3)) == six);
}

TEST_CASE("theta_float") {
    const double G = canonical_G();
    CHECK(theta_float(fac(4), 1, G) == doctest::Approx(k3PiOver16G).epsilon(1e-14));
    CHECK(theta_float(fac(2), 1, G) == doctest::Approx(kPiPlusPiOver8G).epsilon(1e-14));
    CHECK(theta_float(fac(2), 1000, G) - std::numbers::pi ==
          doctest::Approx(kPiOver8G / 1000).epsilon(1e-12));
}

TEST_CASE("w_value") {
    CHECK(w_value(fac(1), 1) == UnitComplex(1.0, 0.0));
    CHECK(std::abs(w_value(fac(2), 1) * w_value(fac(3), 1) - w_value(fac(6), 1)) < 1e-12);
    CHECK(std::abs(w_value(fac(2), 1000) - UnitComplex(-1.0, 0.0)) < std::numbers::pi / 1000);
    CHECK(w_value(fac(12), Level::lambda()) == UnitComplex(-1.0, 0.0));
    for (std::uint64_t n : {7ull, 360ull, 999'983ull})
        CHECK(std::fabs(std::norm(w_value(fac(n), 5)) - 1.0) < 1e-12);
}

TEST_CASE("multiplicativity on random coprime pairs") {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<std::uint64_t> dist(1, 1000);
    int tested = 0;
    while (tested < 10'000) {
        const std::uint64_t a = dist(rng), b = dist(rng);
        if (std::gcd(a, b) != 1 || a * b > sieve().limit()) continue;
        const auto ea = exact_theta(fac(a)), eb = exact_theta(fac(b)),
                   eab = exact_theta(fac(a * b));
        REQUIRE(eab.parity == (ea.parity != eb.parity));
        REQUIRE(eab.r == ea.r + eb.r);
        ++tested;
    }
}

TEST_CASE("exact r stays below G and sectors hold") {
    const double G = canonical_G();
    for (std::uint64_t n = 1; n <= 20'000; ++n) {
        const auto angle = exact_theta(fac(n));
        REQUIRE(angle.r >= 0);
        REQUIRE(angle.r.get_d() < G);
        for (std::uint64_t m : {1ull, 2ull, 3ull, 10ull, 100ull}) {
            const auto check = check_sector(fac(n), m, G);
            REQUIRE(check.in_sector);
            const double theta = theta_float(fac(n), m, G);
            if (!check.escalated) {
                if (angle.parity)
                    REQUIRE((theta > std::numbers::pi &&
                             theta < std::numbers::pi + std::numbers::pi / m));
                else
                    REQUIRE((theta >= 0.0 && theta < std::numbers::pi / m));
            }
        }
    }
    const auto label = sector_of(exact_theta(fac(2)), 4);
    CHECK(label.tag == Sector::Odd);
    CHECK(label.half_width == doctest::Approx(std::numbers::pi / 4));
    CHECK(sector_of(exact_theta(fac(6)), 4).tag == Sector::Even);
}

TEST_CASE("convergence to lambda") {
    for (std::uint64_t m : {10ull, 100ull, 1000ull})
        for (std::uint64_t n = 1; n <= 10'000; ++n) {
            const auto f = fac(n);
            REQUIRE(std::abs(w_value(f, m) - static_cast<double>(liouville(f))) <=
                    std::numbers::pi / static_cast<double>(m));
        }
}

TEST_CASE("injectivity scan") {
    CHECK(injectivity_scan(100, sieve()).duplicates.empty());
    const auto report = injectivity_scan(100'000, sieve());
    CHECK(report.N == 100'000);
    CHECK(report.duplicates.empty());
    CHECK_THROWS_AS(injectivity_scan(2'000'000, sieve()), RangeError);
}

TEST_CASE("exact angle of 8 differs from every other n, including its nearest float neighbour") {
    const auto eight = exact_theta(fac(8));
    const double G = canonical_G();
    const double t8 = theta_float(fac(8), 1, G);
    std::uint64_t nearest = 0;
    double gap = 1e300;
    for (std::uint64_t n = 1; n <= 100'000; ++n) {
        if (n == 8) continue;
        const auto f = fac(n);
        const double d = std::fabs(theta_float(f, 1, G) - t8);
        if (d < gap) {
            gap = d;
            nearest = n;
        }
        REQUIRE_FALSE(exact_theta(f) == eight);
    }
    MESSAGE("nearest to 8 is n=" << nearest << " at float distance " << gap);
    CHECK(gap < 1e-4);
    CHECK(exact_theta(fac(nearest)).r != eight.r);
}

TEST_CASE("CoefficientTable matches the exact path") {
    const CoefficientTable table(sieve(), 100'000);
    CHECK(table.size() == 100'000);
    CHECK(table.G() == canonical_G());
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::uint64_t> dist(1, 100'000);
    for (int i = 0; i < 3000; ++i) {
        const auto n = dist(rng);
        const auto angle = exact_theta(fac(n));
        REQUIRE(table.parity(n) == angle.parity);
        REQUIRE(table.lambda(n) == oracle::liouville(n));
        REQUIRE(std::fabs(table.r(n) - angle.r.get_d()) < 1e-15);
        REQUIRE(std::abs(table.w(n, Level::finite(3)) - w_value(fac(n), 3)) < 1e-12);
    }
    CHECK_THROWS_AS(CoefficientTable(sieve(), 2'000'000), RangeError);
}
