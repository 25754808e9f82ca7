#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wlab/errors.hpp"
#include "wlab/prime_engine.hpp"

using namespace wlab;

// P(2) from oracle::prime_zeta_2() (Euler-Maclaurin zeta, k <= 40).
constexpr double kPrimeZeta2 = 0.4522474200410654985;

TEST_CASE("build_sieve small tables") {
    SieveTable s(10);
    const std::vector<std::uint32_t> expected{0, 0, 2, 3, 2, 5, 2, 7, 2, 3, 2};
    CHECK(std::vector<std::uint32_t>(s.entries().begin(), s.entries().end()) == expected);
    CHECK(SieveTable(100).spf(91) == 7);
    CHECK(s.is_prime(7));
    CHECK_FALSE(s.is_prime(9));
}

TEST_CASE("build_sieve prime count to 10^6") {
    SieveTable s(1'000'000);
    std::uint64_t count = 0;
    for (std::uint64_t n = 2; n <= s.limit(); ++n) count += s.spf(n) == n;
    // pi(10^6) by trial division (oracle::is_prime).
    CHECK(count == 78498);
    CHECK(s.validate());
}

TEST_CASE("build_sieve sizing errors") {
    CHECK_THROWS_AS(SieveTable(1), SizingError);
    CHECK_THROWS_AS(SieveTable(0), SizingError);
    CHECK_THROWS_AS(SieveTable(kMaxSieveLimit + 1), SizingError);
    CHECK_THROWS_AS(SieveTable(1'000'000, 1024), SizingError);
}

TEST_CASE("spf entries are prime divisors on random samples") {
    SieveTable s(2'000'000);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::uint64_t> dist(2, s.limit());
    for (int i = 0; i < 2000; ++i) {
        const auto n = dist(rng);
        CHECK(s.spf(n) == oracle::smallest_factor(n));
        CHECK(oracle::is_prime(s.spf(n)));
    }
}

TEST_CASE("factorize") {
    SieveTable s(100'000);
    CHECK(s.factorize(1).factors.empty());
    CHECK(s.factorize(12).factors == std::vector<PrimePower>{{2, 2}, {3, 1}});
    CHECK(s.factorize(2016).factors == std::vector<PrimePower>{{2, 5}, {3, 2}, {7, 1}});
    CHECK_THROWS_AS(s.factorize(0), RangeError);
    CHECK_THROWS_AS(s.factorize(100'001), RangeError);

    for (std::uint64_t n = 1; n <= s.limit(); ++n) {
        const auto f = s.factorize(n);
        REQUIRE(f.is_canonical());
        REQUIRE(f.value() == n);
    }
}

TEST_CASE("Factorization helpers") {
    Factorization big{{{2, 70}}};
    CHECK_FALSE(big.value().has_value());
    CHECK(big.big_omega() == 70);
    CHECK_FALSE(Factorization{{{3, 1}, {2, 1}}}.is_canonical());
    CHECK_FALSE(Factorization{{{2, 0}}}.is_canonical());
}

TEST_CASE("for_each_prime and primes_in_range") {
    std::vector<std::uint64_t> primes;
    for_each_prime(100, [&](std::uint64_t p) {
        primes.push_back(p);
        return true;
    });
    CHECK(primes.size() == 25);
    CHECK(primes.back() == 97);
    CHECK(primes_in_range(90, 110) == std::vector<std::uint64_t>{97, 101, 103, 107, 109});
    CHECK(primes_in_range(14, 16).empty());

    std::uint64_t count = 0;
    for_each_prime(3'000'000, [&](std::uint64_t p) {
        if (p > 2'999'000) CHECK(oracle::is_prime(p));
        ++count;
        return true;
    });
    CHECK(count == 216816);
}

TEST_CASE("direct sum over p <= 10") {
    CHECK(static_cast<double>(sum_inverse_prime_squares(10)) ==
          doctest::Approx(1.0 / 4 + 1.0 / 9 + 1.0 / 25 + 1.0 / 49).epsilon(1e-15));
    CHECK(static_cast<double>(sum_inverse_prime_squares(10)) ==
          doctest::Approx(0.421519).epsilon(1e-6));
}

TEST_CASE("compute_G both methods") {
    const auto moebius = compute_G(GMethod::MoebiusLogZeta, 1e-12);
    CHECK(moebius.method == GMethod::MoebiusLogZeta);
    CHECK(moebius.error_bound > 0.0);
    CHECK(moebius.error_bound <= 1e-12);
    CHECK(std::fabs(moebius.value - kPrimeZeta2) <= moebius.error_bound);
    CHECK(moebius.value == doctest::Approx(0.452247420041).epsilon(1e-12));

    const auto direct = compute_G(GMethod::DirectTail, 1e-7);
    CHECK(direct.method == GMethod::DirectTail);
    CHECK(direct.error_bound <= 1e-7);
    CHECK(std::fabs(direct.value - kPrimeZeta2) <= direct.error_bound);
    CHECK(std::fabs(direct.value - moebius.value) < 2e-7);
    CHECK(std::fabs(direct.value - moebius.value) <= direct.error_bound + moebius.error_bound);

    CHECK(canonical_G() == moebius.value);
}

TEST_CASE("compute_G precision errors") {
    CHECK_THROWS_AS(compute_G(GMethod::DirectTail, 1e-8), PrecisionError);
    CHECK_THROWS_AS(compute_G(GMethod::MoebiusLogZeta, 1e-15), PrecisionError);
    CHECK_THROWS_AS(compute_G(GMethod::MoebiusLogZeta, 0.0), PrecisionError);
}

TEST_CASE("truncations of G are monotone and bounded") {
    const double g = canonical_G();
    long double prev = 0.0L;
    for (std::uint64_t x : {10ull, 100ull, 1000ull, 10'000ull, 100'000ull, 1'000'000ull}) {
        const long double s = sum_inverse_prime_squares(x);
        CHECK(s > prev);
        CHECK(static_cast<double>(s) <= g);
        prev = s;
    }
    // (pi/G) sum_{p <= 10^6} p^-2 falls short of pi by (pi/G) * tail <= (pi/G) * bound.
    const double pi = 3.14159265358979323846;
    const double deficit = pi - pi / g * static_cast<double>(prev);
    CHECK(deficit > 0.0);
    CHECK(deficit <= pi / g * prime_square_tail_bound(1e6));
    CHECK(deficit < 1e-5 * pi);
}

TEST_CASE("sieve cache round trip and format") {
    const auto dir = std::filesystem::temp_directory_path() / "wlab-test-cache";
    std::filesystem::remove_all(dir);
    const SieveTable built(1000);
    const auto file = sieve_cache::path_for(dir, 1000);
    sieve_cache::write(built, file);

    std::ifstream in(file, std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
    REQUIRE(bytes.size() == 5 + 1 + 8 + 1001 * 4);
    CHECK(std::string(bytes.begin(), bytes.begin() + 5) == "WLAB1");
    CHECK(bytes[5] == 1);
    CHECK(bytes[6] == (1000 & 0xff));
    CHECK(bytes[7] == (1000 >> 8));
    // spf[91] = 7 at offset 14 + 4*91, little-endian
    CHECK(bytes[14 + 4 * 91] == 7);

    const SieveTable loaded = sieve_cache::read(file);
    CHECK(loaded.limit() == 1000);
    CHECK(std::equal(loaded.entries().begin(), loaded.entries().end(), built.entries().begin()));
    CHECK(loaded.validate());

    // Truncated file is rejected, and load_or_build repairs it.
    std::filesystem::resize_file(file, 100);
    CHECK_THROWS_AS(sieve_cache::read(file), IoError);
    const SieveTable repaired = sieve_cache::load_or_build(1000, dir);
    CHECK(repaired.limit() == 1000);
    CHECK(sieve_cache::read(file).limit() == 1000);
    std::filesystem::remove_all(dir);
}

TEST_CASE("cache directory honours WLAB_CACHE_DIR") {
    ::setenv("WLAB_CACHE_DIR", "/tmp/wlab-env-check", 1);
    CHECK(sieve_cache::default_directory() == std::filesystem::path("/tmp/wlab-env-check"));
    ::unsetenv("WLAB_CACHE_DIR");
    CHECK(sieve_cache::default_directory() != std::filesystem::path("/tmp/wlab-env-check"));
}
