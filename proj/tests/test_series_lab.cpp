#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wlab/errors.hpp"
#include "wlab/series_lab.hpp"
#include "wlab/zeta.hpp"

using namespace wlab;

namespace {

const SieveTable& sieve() {
    static const SieveTable s(1'000'000);
    return s;
}

const CoefficientTable& table() {
    static const CoefficientTable t(sieve(), 1'000'000);
    return t;
}

// pi^2 / 15 and zeta(6) / zeta(3), frozen.
constexpr double kRatio2 = 0.657973626739290574;
constexpr double kRatio3 = 0.846335193708694903;

}  // namespace

TEST_CASE("partial sums") {
    for (auto level : {Level::lambda(), Level::finite(1), Level::finite(7)})
        for (SeriesPoint s : {SeriesPoint{2.0, 0.0}, SeriesPoint{0.7, 14.1}}) {
            const auto rec = partial_sum(table(), s, 1, level);
            CHECK(std::abs(rec.value - std::complex<double>(1.0, 0.0)) < 1e-15);
        }

    const auto lam = partial_sum(table(), {2.0, 0.0}, 1'000'000, Level::lambda());
    CHECK(std::fabs(lam.value.real() - kRatio2) < 1e-4);
    CHECK(std::fabs(lam.value.real() - static_cast<double>(zeta_ratio_ref({2.0, 0.0}).real())) <
          1e-4);
    CHECK(std::fabs(lam.value.imag()) < 1e-15);

    const auto lam3 = partial_sum(table(), {3.0, 0.0}, 100'000, Level::lambda());
    CHECK(std::fabs(lam3.value.real() - kRatio3) < 1e-9);

    CHECK_THROWS_AS(partial_sum(table(), {0.0, 1.0}, 10, Level::lambda()), DomainError);
    CHECK_THROWS_AS(partial_sum(table(), {2.0, 0.0}, 2'000'000, Level::lambda()), RangeError);
}

TEST_CASE("partial sum against the Euler product") {
    const auto direct = partial_sum(table(), {2.0, 0.0}, 1'000'000, Level::finite(1));
    const auto product = euler_product({2.0, 0.0}, 100'000, 60, Level::finite(1));
    CHECK(std::abs(direct.value - product.value) < 1e-3);
    CHECK(product.primes_used == 9592);
    CHECK(product.truncation_bound < 1e-15);
}

TEST_CASE("Euler product details") {
    const auto empty = euler_product({3.0, 0.0}, 1, 10, Level::finite(1));
    CHECK(empty.value == std::complex<double>(1.0, 0.0));
    CHECK(empty.primes_used == 0);

    // Only p = 2, three terms.
    const double G = canonical_G();
    const auto two = euler_product({3.0, 0.0}, 2, 3, Level::finite(1));
    const std::complex<double> expected = 1.0 - std::polar(1.0 / 8, psi_m(2, 1, 1, G)) +
                                          std::polar(1.0 / 64, psi_m(2, 2, 1, G)) -
                                          std::polar(1.0 / 512, psi_m(2, 3, 1, G));
    CHECK(std::abs(two.value - expected) < 1e-15);

    const auto lo = euler_product({2.0, 0.0}, 10'000, 40, Level::finite(3));
    const auto hi = euler_product({2.0, 0.0}, 100'000, 40, Level::finite(3));
    CHECK(std::abs(lo.value - hi.value) < 2e-3);

    const auto lam = euler_product({2.0, 0.0}, 1'000'000, 60, Level::lambda());
    CHECK(std::fabs(lam.value.real() - kRatio2) < 1e-6);

    CHECK_THROWS_AS(euler_product({1.0, 0.0}, 100, 10, Level::finite(1)), DomainError);
    CHECK_THROWS_AS(euler_product({2.0, 0.0}, 100, 1, Level::finite(1)), DomainError);
}

TEST_CASE("determinism across thread counts") {
    for (auto level : {Level::lambda(), Level::finite(1), Level::finite(10)}) {
        const auto one = partial_sum(table(), {0.75, 21.0}, 1'000'000, level, 1);
        for (unsigned threads : {2u, 3u, 8u}) {
            const auto many = partial_sum(table(), {0.75, 21.0}, 1'000'000, level, threads);
            REQUIRE(many.value.real() == one.value.real());
            REQUIRE(many.value.imag() == one.value.imag());
        }
    }
}

TEST_CASE("checkpoint schedule") {
    const auto sched = checkpoint_schedule(1000);
    CHECK(sched.front() == 1);
    CHECK(sched.back() == 1000);
    for (std::size_t i = 1; i < sched.size(); ++i) CHECK(sched[i] > sched[i - 1]);
    CHECK(checkpoint_schedule(0).empty());
    CHECK(checkpoint_schedule(16, 2.0) == std::vector<std::uint64_t>{1, 2, 4, 8, 16});
    CHECK_THROWS_AS(checkpoint_schedule(10, 1.0), DomainError);
}

TEST_CASE("summatory checkpoints") {
    const auto lam = summatory_checkpoints(table(), 1'000'000, Level::lambda());
    CHECK(lam.back().N == 1'000'000);
    CHECK(lam.back().A.real() == -530.0);
    CHECK(lam.back().abs_A == 530.0);

    const auto ones = summatory_checkpoints(table(), 10, Level::finite(1), 2.0);
    REQUIRE(ones.back().N == 10);
    std::complex<double> direct{0.0, 0.0};
    for (std::uint64_t n = 1; n <= 10; ++n) direct += w_value(sieve().factorize(n), 1);
    CHECK(std::abs(ones.back().A - direct) < 1e-14);

    const auto dbl = summatory_checkpoints(table(), 1 << 19, Level::finite(1), 2.0);
    for (std::size_t i = 1; i < dbl.size(); ++i)
        CHECK(std::fabs(dbl[i].abs_A - dbl[i - 1].abs_A) <=
              static_cast<double>(dbl[i - 1].N) + 1e-9);
}

TEST_CASE("growth fit on synthetic data") {
    std::vector<Checkpoint> half, three;
    for (std::uint64_t N : checkpoint_schedule(1'000'000)) {
        half.push_back({N, {std::pow(double(N), 0.5), 0.0}, std::pow(double(N), 0.5)});
        three.push_back({N, {0.0, 3 * std::pow(double(N), 0.75)}, 3 * std::pow(double(N), 0.75)});
    }
    const auto a = growth_fit(half);
    CHECK(std::fabs(a.alpha_hat - 0.5) < 1e-9);
    CHECK(std::fabs(a.M_hat - 1.0) < 1e-9);
    CHECK(a.fit_quality == doctest::Approx(1.0));
    const auto b = growth_fit(three);
    CHECK(std::fabs(b.alpha_hat - 0.75) < 1e-9);
    CHECK(std::fabs(b.M_hat - 3.0) < 1e-9);

    std::vector<Checkpoint> few(half.begin(), half.begin() + 5);
    CHECK_THROWS_AS(growth_fit(few), InsufficientDataError);
    std::vector<Checkpoint> small;
    for (std::uint64_t N = 1; N <= 20; ++N) small.push_back({N, {0.5, 0.0}, 0.5});
    CHECK_THROWS_AS(growth_fit(small), InsufficientDataError);
    std::vector<Checkpoint> backwards = half;
    std::swap(backwards[3], backwards[4]);
    CHECK_THROWS_AS(growth_fit(backwards), DomainError);
}

TEST_CASE("growth fit on real data is finite") {
    const auto fit = growth_fit(summatory_checkpoints(table(), 1'000'000, Level::finite(1)));
    CHECK(std::isfinite(fit.alpha_hat));
    CHECK(fit.checkpoints.size() >= kMinFitPoints);
    MESSAGE("m=1 alpha_hat=" << fit.alpha_hat << " r2=" << fit.fit_quality);
}

TEST_CASE("grid shape") {
    const auto g = grid_shape(12, 0.6);
    CHECK(g.J == 4);
    CHECK(g.J * g.K + g.R_N == 12);
    CHECK(g.R_N < g.J);

    for (double alpha : {0.55, 0.6, 0.75, 0.9}) {
        for (std::uint64_t N = 10; N <= 100'000; ++N) {
            const auto s = grid_shape(N, alpha);
            REQUIRE(s.J * s.K + s.R_N == N);
            REQUIRE(s.R_N < s.J);
        }
        std::mt19937_64 rng(static_cast<std::uint64_t>(alpha * 1000));
        std::uniform_int_distribution<std::uint64_t> dist(100'001, 10'000'000);
        for (int i = 0; i < 200'000; ++i) {
            const auto N = dist(rng);
            const auto s = grid_shape(N, alpha);
            REQUIRE(s.J * s.K + s.R_N == N);
            REQUIRE(s.R_N < s.J);
        }
    }
    CHECK_THROWS_AS(grid_shape(100, 0.5), DomainError);
    CHECK_THROWS_AS(grid_shape(100, 1.0), DomainError);
}

TEST_CASE("grid diagnostic chain") {
    for (auto level : {Level::finite(1), Level::finite(5), Level::lambda()})
        for (std::uint64_t N : {10'000ull, 100'000ull, 1'000'000ull})
            for (double alpha : {0.6, 0.75, 0.9}) {
                const auto d = grid_diagnostic(table(), N, alpha, level);
                REQUIRE(d.chain_holds);
                REQUIRE(d.star_sum_magnitude <= d.K * d.max_column_magnitude * (1 + 1e-12) + 1e-9);
                if (level == Level::finite(1) && alpha == 0.75)
                    MESSAGE("N=" << N << " scaled_bound=" << d.scaled_bound);
            }
    CHECK_THROWS_AS(grid_diagnostic(table(), 2'000'000, 0.75, Level::finite(1)), RangeError);
}

TEST_CASE("uniformity gap") {
    const auto same =
        uniformity_gap(table(), {2.0, 0.0}, 10'000, Level::finite(4), Level::finite(4));
    CHECK(same.measured == 0.0);
    CHECK(same.holds);

    const auto g = uniformity_gap(table(), {2.0, 0.0}, 10'000, Level::finite(10), Level::lambda());
    CHECK(g.holds);
    CHECK(g.bound < std::numbers::pi / 10 * std::numbers::pi * std::numbers::pi / 6);

    double previous = 1e300;
    for (std::uint64_t m : {1ull, 10ull, 100ull, 1000ull}) {
        const auto gap =
            uniformity_gap(table(), {2.0, 0.0}, 10'000, Level::finite(m), Level::lambda());
        CHECK(gap.measured <= previous + 1e-12);
        previous = gap.measured;
    }

    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> sigma(0.6, 3.0), t(-30.0, 30.0);
    std::uniform_int_distribution<std::uint64_t> N(1, 20'000), lvl(0, 200);
    for (int i = 0; i < 1000; ++i) {
        const auto a = lvl(rng), b = lvl(rng);
        const Level m = a == 0 ? Level::lambda() : Level::finite(a);
        const Level q = b == 0 ? Level::lambda() : Level::finite(b);
        REQUIRE(uniformity_gap(table(), {sigma(rng), t(rng)}, N(rng), m, q).holds);
    }
}

TEST_CASE("checkpoints and grid are independent of thread count") {
    for (auto level : {Level::lambda(), Level::finite(1)}) {
        const auto one = summatory_checkpoints(table(), 1'000'000, level, kCheckpointRatio, 1);
        const auto grid1 = grid_diagnostic(table(), 300'000, 0.75, level, 1);
        for (unsigned threads : {2u, 5u}) {
            const auto many =
                summatory_checkpoints(table(), 1'000'000, level, kCheckpointRatio, threads);
            REQUIRE(many.size() == one.size());
            for (std::size_t i = 0; i < one.size(); ++i) {
                REQUIRE(many[i].N == one[i].N);
                REQUIRE(many[i].A.real() == one[i].A.real());
                REQUIRE(many[i].A.imag() == one[i].A.imag());
            }
            const auto grid = grid_diagnostic(table(), 300'000, 0.75, level, threads);
            REQUIRE(grid.max_column_magnitude == grid1.max_column_magnitude);
            REQUIRE(grid.column_magnitude_sum == grid1.column_magnitude_sum);
            REQUIRE(grid.star_sum_magnitude == grid1.star_sum_magnitude);
        }
    }
}

TEST_CASE("checkpoints agree with a direct running sum") {
    const auto cps = summatory_checkpoints(table(), 100'000, Level::finite(2));
    std::complex<double> running{0.0, 0.0};
    std::size_t next = 0;
    for (std::uint64_t n = 1; n <= 100'000 && next < cps.size(); ++n) {
        running += table().w(n, Level::finite(2));
        if (n == cps[next].N) {
            REQUIRE(std::abs(running - cps[next].A) < 1e-9);
            ++next;
        }
    }
    CHECK(next == cps.size());
}
