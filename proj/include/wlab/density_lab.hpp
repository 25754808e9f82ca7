#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wlab/prime_engine.hpp"
#include "wlab/w_core.hpp"

namespace wlab {

/// Primes p_1 = 2, p_2 = 3, ... with compensated prefix sums of p^-2, grown
/// on demand. Tails are (pi/G) * sum_{j >= b} p_j^-2, computed as
/// (pi/G) * (G - prefix(b)) so the part beyond the sieved primes is the
/// analytic remainder of G.
class PrimeSeriesTable {
public:
    explicit PrimeSeriesTable(double G = canonical_G());

    double G() const noexcept { return G_; }
    std::size_t size() const noexcept { return primes_.size(); }
    /// 1-based prime index; extends the table as needed.
    std::uint64_t prime(std::size_t index);
    /// Tail from index b (1-based). tail(1) == pi.
    long double tail(std::size_t b);
    /// sum_{j < b} p_j^-2.
    long double prefix(std::size_t b);
    void ensure(std::size_t count);

private:
    double G_;
    std::vector<std::uint64_t> primes_;
    std::vector<long double> prefix_;  // prefix_[i] = sum of p^-2 over the first i primes
    long double sum_ = 0.0L;           // Neumaier running sum
    long double comp_ = 0.0L;
};

struct Segment {
    std::size_t first_index = 0;
    std::size_t last_index = 0;
    std::uint64_t first_prime = 0;
    std::uint64_t last_prime = 0;
};

struct SpecialPower {
    std::size_t index = 0;
    std::uint64_t p = 0;
    std::uint32_t k = 0;
};

enum class StageKind { Segment, PrimePower };

/// One greedy stage: the residual target x_i, the chosen b_i, then either a
/// segment [b_i, t_i] or a prime power (p, k), and the running S_i, eps_i.
struct IterationRecord {
    std::size_t stage = 0;
    double x_i = 0.0;
    std::size_t b = 0;
    StageKind kind = StageKind::Segment;
    std::size_t t = 0;
    std::uint64_t p = 0;
    std::uint32_t k = 0;
    double S = 0.0;
    double eps = 0.0;
};

enum class ConstructionStatus { Converged, BudgetExhausted };

std::string to_string(ConstructionStatus status);

struct Construction {
    double target_x = 0.0;
    double epsilon = 0.0;
    std::size_t prime_budget = 0;
    double G = 0.0;
    std::vector<Segment> segments;
    std::vector<SpecialPower> special_powers;
    double achieved_S = 0.0;
    std::vector<IterationRecord> iteration_log;
    ConstructionStatus status = ConstructionStatus::BudgetExhausted;
    std::string note;
};

inline constexpr std::size_t kDefaultPrimeBudget = 10'000'000;

/// For p in {2, 3, 5}: psi(p) and psi(p^2) both lie below the tail of the
/// prime series after p. The fallback and restart steps rely on this for the
/// primes too small for the Bertrand argument. Checked once per process by
/// approximate_angle, which throws StateError if it fails.
bool small_prime_conditions_hold(PrimeSeriesTable& table);

/// Greedy tail selection. Throws DomainError unless 0 < x < pi, epsilon > 0
/// and prime_budget >= 1. Running out of prime indices is reported through
/// `status`, not thrown.
Construction approximate_angle(double x, double epsilon,
                               std::size_t prime_budget = kDefaultPrimeBudget);
Construction approximate_angle(double x, double epsilon, std::size_t prime_budget,
                               PrimeSeriesTable& table);

struct VerificationResult {
    bool ok = false;
    /// (pi/G) times the 128-bit sum over segments and exact prime powers.
    double recomputed_S = 0.0;
    std::string reason;
};

/// Recomputes S from scratch in 128-bit arithmetic: segment primes are
/// re-enumerated from their bounds, so neither the loop accumulator nor the
/// construction's prime table is trusted.
VerificationResult verify_construction_detailed(const Construction& c);
bool verify_construction(const Construction& c);

struct Witness {
    Factorization factorization;
    /// Prime whose exponent was raised by one to fix lambda, 0 if none.
    std::uint64_t adjusted_prime = 0;
    /// Angle shift caused by that adjustment, radians.
    double adjustment_shift = 0.0;
    /// Extra prime supplied when the construction has no segments, 0 if none.
    std::uint64_t filler_prime = 0;
};

/// n_k = m' * n^(2k) with n the product of segment primes, m' the product of
/// special powers, and the exponent of the smallest segment prime raised by
/// one when lambda(m') != parity_target. Throws StateError for a
/// non-converged construction, DomainError for k = 0 or a bad sign.
Witness witness(const Construction& c, int parity_target, std::uint32_t k);
Factorization witness_factorization(const Construction& c, int parity_target, std::uint32_t k);

/// One line per stage: "i x_i b_i t_i|(p,k) S_i eps_i".
std::string to_trace(const Construction& c);

struct SectorDensityReport {
    double x = 0.0;
    double y = 0.0;
    std::uint64_t m = 1;
    std::uint64_t N = 0;
    std::uint64_t count_A = 0;
    std::uint64_t count_B = 0;
    double delta_A = 0.0;
    double delta_B = 0.0;
    /// Values inside the float guard band that were settled by the exact path.
    std::uint64_t resolved_boundary = 0;
};

/// Counts n <= N with theta_m(n) in (x, y) (set A) and in (x + pi, y + pi)
/// (set B). Requires 0 <= x < y <= pi/m and N <= table.size().
SectorDensityReport sector_density(double x, double y, std::uint64_t N, std::uint64_t m,
                                   const CoefficientTable& table, const SieveTable& sieve);

}  // namespace wlab
