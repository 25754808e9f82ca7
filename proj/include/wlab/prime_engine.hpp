#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace wlab {

/// One prime power p^k of a factorization, k >= 1.
struct PrimePower {
    std::uint64_t p = 0;
    std::uint32_t k = 0;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Canonical factorization: primes strictly increasing, exponents >= 1.
/// The integer itself is never stored, so witnesses like m * n^(2k) can be
/// described without materializing them.
struct Factorization {
    std::vector<PrimePower> factors;

    /// Product of the factors, or nullopt when it does not fit in 64 bits.
    std::optional<std::uint64_t> value() const;
    /// Total number of prime factors counted with multiplicity.
    std::uint64_t big_omega() const;
    /// True when primes are strictly increasing and every exponent is >= 1.
    bool is_canonical() const;

    friend bool operator==(const Factorization&, const Factorization&) = default;
};

/// Default memory ceiling for a sieve table: 2 GiB of 32-bit entries, i.e.
/// limits up to about 5.3e8.
inline constexpr std::size_t kDefaultSieveMemoryBudget = std::size_t{2} << 30;
/// Entries are 32-bit, so the hard ceiling is 2^32 - 1.
inline constexpr std::uint64_t kMaxSieveLimit = 0xFFFFFFFFull;

/// Smallest-prime-factor table for 0..limit. Immutable once built.
class SieveTable {
public:
    /// Linear sieve. Throws SizingError when limit < 2, limit > 2^32 - 1,
    /// or the table would exceed `memory_budget` bytes.
    explicit SieveTable(std::uint64_t limit, std::size_t memory_budget = kDefaultSieveMemoryBudget);

    /// Adopt an existing spf array (used by the on-disk cache). The entries
    /// are trusted; call validate() when the source is untrusted.
    static SieveTable from_entries(std::vector<std::uint32_t> spf);

    std::uint64_t limit() const noexcept { return limit_; }
    /// spf[n] for 2 <= n <= limit; 0 for n in {0, 1}.
    std::uint32_t spf(std::uint64_t n) const { return spf_[n]; }
    bool is_prime(std::uint64_t n) const { return n >= 2 && n <= limit_ && spf_[n] == n; }
    std::span<const std::uint32_t> entries() const noexcept { return spf_; }
    std::size_t memory_bytes() const noexcept { return spf_.size() * sizeof(std::uint32_t); }

    /// Throws RangeError when n is 0 or beyond limit().
    Factorization factorize(std::uint64_t n) const;

    /// Cheap structural check: every spf[n] divides n and spf[spf[n]] == spf[n].
    bool validate() const;

private:
    SieveTable() = default;

    std::uint64_t limit_ = 0;
    std::vector<std::uint32_t> spf_;
};

/// Visit every prime p <= limit in increasing order (segmented Eratosthenes,
/// O(sqrt(limit)) memory). The callback returns false to stop early.
void for_each_prime(std::uint64_t limit, const std::function<bool(std::uint64_t)>& visit);

/// Primes in [lo, hi], increasing.
std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi);

/// Sum of 1/p^2 over p <= limit, compensated long-double accumulation in
/// increasing p.
long double sum_inverse_prime_squares(std::uint64_t limit);

/// Rigorous upper bound on sum_{p > x} p^-2 from pi(t) < 1.25506 t / ln t:
/// the tail is at most 2.51012 / (x ln x). Valid for x >= 17.
double prime_square_tail_bound(double x);

enum class GMethod { DirectTail, MoebiusLogZeta };

std::string_view to_string(GMethod method);

/// The prime zeta value P(2) = sum_p p^-2 with a rigorous error bound.
struct PrimeZetaValue {
    double value = 0.0;
    double error_bound = 0.0;
    GMethod method = GMethod::MoebiusLogZeta;
    /// Truncation point: largest prime for DirectTail, largest k for
    /// MoebiusLogZeta.
    std::uint64_t cutoff = 0;
};

/// P(2) to the requested absolute precision. DirectTail needs
/// precision_target >= 1e-7, MoebiusLogZeta needs >= 1e-14; anything finer
/// throws PrecisionError.
PrimeZetaValue compute_G(GMethod method, double precision_target);

/// DirectTail evaluation with an explicit prime cutoff (>= 17).
PrimeZetaValue compute_G_direct(std::uint64_t prime_cutoff);

/// The shared G used by every floating-point angle in the library:
/// MoebiusLogZeta at 1e-12, computed once.
double canonical_G();

/// Sieve cache keyed by limit. File layout: "WLAB1", version byte (1),
/// u64 LE limit, then (limit + 1) u32 LE spf entries.
namespace sieve_cache {

inline constexpr std::string_view kMagic = "WLAB1";
inline constexpr std::uint8_t kVersion = 1;

/// $WLAB_CACHE_DIR, else $XDG_CACHE_HOME/wlab, else $HOME/.cache/wlab,
/// else <tmp>/wlab.
std::filesystem::path default_directory();
std::filesystem::path path_for(const std::filesystem::path& dir, std::uint64_t limit);

/// Write via temp file plus rename. Throws IoError.
void write(const SieveTable& table, const std::filesystem::path& file);
/// Throws IoError on a missing, truncated, or malformed file.
SieveTable read(const std::filesystem::path& file);

/// Load from `dir` if cached, otherwise build and store.
SieveTable load_or_build(std::uint64_t limit, const std::filesystem::path& dir);

}  // namespace sieve_cache

}  // namespace wlab
