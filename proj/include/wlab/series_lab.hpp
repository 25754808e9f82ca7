#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "wlab/w_core.hpp"

namespace wlab {

struct SeriesPoint {
    double sigma = 0.0;
    double t = 0.0;

    std::complex<double> s() const { return {sigma, t}; }
    friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

struct PartialSumRecord {
    Level level = Level::lambda();
    std::uint64_t N = 0;
    SeriesPoint s;
    std::complex<double> value;
};

/// Terms are summed in ascending n inside fixed blocks of this many terms;
/// block sums are combined by a fixed pairwise tree. Thread count only
/// changes who computes a block, never the arithmetic.
inline constexpr std::uint64_t kSummationBlock = 4096;

/// F_{m,N}(s) = sum_{n <= N} w_m(n) n^-s. Throws RangeError when N exceeds
/// the table, DomainError when sigma <= 0.
PartialSumRecord partial_sum(const CoefficientTable& table, SeriesPoint s, std::uint64_t N,
                             const Level& level, unsigned threads = 1);

struct EulerProductResult {
    std::complex<double> value;
    /// Sum over p <= P of the geometric bound on the dropped k > Kmax terms.
    double truncation_bound = 0.0;
    std::uint64_t primes_used = 0;
};

/// prod_{p <= P} sum_{k=0}^{Kmax} (-1)^k e^(i psi_m(p^k)) p^(-ks).
/// Throws DomainError for sigma <= 1 or Kmax < 2.
EulerProductResult euler_product(SeriesPoint s, std::uint64_t prime_cutoff, std::uint32_t k_max,
                                 const Level& level);

struct Checkpoint {
    std::uint64_t N = 0;
    std::complex<double> A;
    double abs_A = 0.0;
};

inline constexpr double kCheckpointRatio = 1.189207115002721;  // 2^(1/4)

/// Geometric schedule ceil(ratio^j) <= N_max, deduplicated, ending at N_max.
std::vector<std::uint64_t> checkpoint_schedule(std::uint64_t N_max,
                                               double ratio = kCheckpointRatio);

/// A(N) = sum_{n <= N} w(n) at each scheduled N. Block totals are summed
/// serially in a fixed order, so the result does not depend on `threads`.
/// The lambda level accumulates exactly in integers.
std::vector<Checkpoint> summatory_checkpoints(const CoefficientTable& table, std::uint64_t N_max,
                                              const Level& level, double ratio = kCheckpointRatio,
                                              unsigned threads = 1);

struct GrowthFit {
    std::vector<Checkpoint> checkpoints;  // points actually used in the fit
    double alpha_hat = 0.0;
    double M_hat = 0.0;
    double fit_quality = 0.0;  // coefficient of determination
};

inline constexpr std::size_t kMinFitPoints = 8;

/// Least squares of log|A(N)| on log N after dropping |A(N)| < 1. Throws
/// InsufficientDataError with fewer than 8 usable points.
GrowthFit growth_fit(const std::vector<Checkpoint>& checkpoints);

struct GridDiagnostic {
    std::uint64_t N = 0;
    double alpha = 0.0;
    std::uint64_t J = 0;
    std::uint64_t K = 0;
    std::uint64_t R_N = 0;
    /// max_k |sum_j e^(i theta_{j,k})| over the J x K ordered grid.
    double max_column_magnitude = 0.0;
    /// sum_k |column k|, the middle link of the triangle-inequality chain.
    double column_magnitude_sum = 0.0;
    /// |sum of w(n) for R_N < n <= N|.
    double star_sum_magnitude = 0.0;
    /// (2 pi / N^alpha) * star_sum_magnitude.
    double scaled_bound = 0.0;
    /// star <= column sum <= K * max column, with a relative 1e-12 slack.
    bool chain_holds = false;
};

/// J = floor(N^alpha), K = floor(N^(1-alpha)), switched to the ceiling when
/// the remainder would reach J. Throws DomainError for alpha outside
/// (1/2, 1) or J*K == 0, RangeError when N exceeds the table.
struct GridShape {
    std::uint64_t J = 0;
    std::uint64_t K = 0;
    std::uint64_t R_N = 0;
};
GridShape grid_shape(std::uint64_t N, double alpha);

GridDiagnostic grid_diagnostic(const CoefficientTable& table, std::uint64_t N, double alpha,
                               const Level& level, unsigned threads = 1);

struct UniformityGap {
    double measured = 0.0;  // |F_{m,N}(s) - F_{q,N}(s)|
    double bound = 0.0;     // (pi / min(m, q)) * sum_{n <= N} n^-sigma
    bool holds = false;
};

UniformityGap uniformity_gap(const CoefficientTable& table, SeriesPoint s, std::uint64_t N,
                             const Level& m, const Level& q);

}  // namespace wlab
