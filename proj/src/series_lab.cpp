#include "wlab/series_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>

#include "wlab/errors.hpp"

namespace wlab {

namespace {

using cd = std::complex<double>;

// w(n) n^-s with n^-s = exp(-s ln n).
cd series_term(const CoefficientTable& table, std::uint64_t n, SeriesPoint s, const Level& level) {
    const double ln = std::log(static_cast<double>(n));
    const double mag = std::exp(-s.sigma * ln);
    if (level.is_lambda()) {
        const double signed_mag = table.parity(n) ? -mag : mag;
        const double phase = -s.t * ln;
        return {signed_mag * std::cos(phase), signed_mag * std::sin(phase)};
    }
    return std::polar(mag, table.theta(n, level.m(), table.G()) - s.t * ln);
}

cd pairwise(const std::vector<cd>& parts, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return parts[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise(parts, lo, mid) + pairwise(parts, mid, hi);
}

// Runs body(b) for every block index b < blocks, spread over workers by
// b mod threads. Bodies write only to their own slot.
template <typename Body>
void for_each_block(std::uint64_t blocks, unsigned threads, const Body& body) {
    threads = std::max(1u, static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks)));
    auto run = [&](unsigned worker) {
        for (std::uint64_t b = worker; b < blocks; b += threads) body(b);
    };
    if (threads == 1) {
        run(0);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
}

std::uint64_t block_count(std::uint64_t N) { return (N + kSummationBlock - 1) / kSummationBlock; }
std::uint64_t block_first(std::uint64_t b) { return b * kSummationBlock + 1; }

// Fixed-tree sum of term(n) for n = 1..N.
template <typename Term>
cd blocked_sum(std::uint64_t N, unsigned threads, const Term& term) {
    if (N == 0) return {0.0, 0.0};
    const std::uint64_t blocks = block_count(N);
    std::vector<cd> parts(static_cast<std::size_t>(blocks));
    for_each_block(blocks, threads, [&](std::uint64_t b) {
        const std::uint64_t last = std::min(N, block_first(b) + kSummationBlock - 1);
        cd acc{0.0, 0.0};
        for (std::uint64_t n = block_first(b); n <= last; ++n) acc += term(n);
        parts[static_cast<std::size_t>(b)] = acc;
    });
    return pairwise(parts, 0, parts.size());
}

// Neumaier-compensated complex accumulator.
struct Compensated {
    double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;

    static void add(double& sum, double& comp, double v) {
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    void add(cd v) {
        add(re, cre, v.real());
        add(im, cim, v.imag());
    }
    cd value() const { return {re + cre, im + cim}; }
};

}  // namespace

PartialSumRecord partial_sum(const CoefficientTable& table, SeriesPoint s, std::uint64_t N,
                             const Level& level, unsigned threads) {
    if (!(s.sigma > 0.0)) throw DomainError("partial_sum: sigma must be > 0");
    if (N > table.size()) throw RangeError("partial_sum: N exceeds the coefficient table");
    PartialSumRecord rec{level, N, s, {}};
    rec.value =
        blocked_sum(N, threads, [&](std::uint64_t n) { return series_term(table, n, s, level); });
    return rec;
}

EulerProductResult euler_product(SeriesPoint s, std::uint64_t prime_cutoff, std::uint32_t k_max,
                                 const Level& level) {
    if (!(s.sigma > 1.0)) throw DomainError("euler_product: requires sigma > 1");
    if (k_max < 2) throw DomainError("euler_product: Kmax must be >= 2");
    EulerProductResult out{{1.0, 0.0}, 0.0, 0};
    const double G = canonical_G();
    for_each_prime(prime_cutoff, [&](std::uint64_t p) {
        const double ln = std::log(static_cast<double>(p));
        cd factor{1.0, 0.0};
        for (std::uint32_t k = 1; k <= k_max; ++k) {
            const double mag = std::exp(-s.sigma * ln * k);
            double phase = -s.t * ln * k;
            if (!level.is_lambda()) phase += psi_m(p, k, level.m(), G);
            const cd term = std::polar(mag, phase);
            factor += (k % 2 == 1) ? -term : term;
        }
        const double q = std::exp(-s.sigma * ln);
        out.truncation_bound += std::pow(q, k_max + 1) / (1.0 - q);
        out.value *= factor;
        ++out.primes_used;
        return true;
    });
    return out;
}

std::vector<std::uint64_t> checkpoint_schedule(std::uint64_t N_max, double ratio) {
    if (!(ratio > 1.0)) throw DomainError("checkpoint_schedule: ratio must be > 1");
    std::vector<std::uint64_t> out;
    if (N_max == 0) return out;
    for (int j = 0;; ++j) {
        const long double v = std::ceil(std::pow(static_cast<long double>(ratio), j) - 1e-9L);
        if (v > static_cast<long double>(N_max)) break;
        const auto n = static_cast<std::uint64_t>(v);
        if (out.empty() || out.back() != n) out.push_back(n);
    }
    if (out.back() != N_max) out.push_back(N_max);
    return out;
}

std::vector<Checkpoint> summatory_checkpoints(const CoefficientTable& table, std::uint64_t N_max,
                                              const Level& level, double ratio, unsigned threads) {
    if (N_max > table.size())
        throw RangeError("summatory_checkpoints: N_max exceeds the coefficient table");
    const auto schedule = checkpoint_schedule(N_max, ratio);
    std::vector<Checkpoint> out;
    out.reserve(schedule.size());
    if (schedule.empty()) return out;

    // A(N) = (running total of whole blocks before N's block) + (partial sum
    // of N's block up to N). Block totals may be computed in any order; the
    // running total is always accumulated serially, so threads cannot change
    // a single bit.
    const std::uint64_t blocks = block_count(N_max);
    auto block_last = [&](std::uint64_t b) {
        return std::min(N_max, block_first(b) + kSummationBlock - 1);
    };

    if (level.is_lambda()) {
        std::vector<std::int64_t> totals(static_cast<std::size_t>(blocks));
        for_each_block(blocks, threads, [&](std::uint64_t b) {
            std::int64_t s = 0;
            for (std::uint64_t n = block_first(b); n <= block_last(b); ++n) s += table.lambda(n);
            totals[static_cast<std::size_t>(b)] = s;
        });
        std::int64_t before = 0;
        std::uint64_t b = 0;
        for (const std::uint64_t N : schedule) {
            for (; block_first(b) + kSummationBlock - 1 < N; ++b)
                before += totals[static_cast<std::size_t>(b)];
            std::int64_t A = before;
            for (std::uint64_t n = block_first(b); n <= N; ++n) A += table.lambda(n);
            const double a = static_cast<double>(A);
            out.push_back({N, {a, 0.0}, std::fabs(a)});
        }
        return out;
    }

    std::vector<cd> totals(static_cast<std::size_t>(blocks));
    for_each_block(blocks, threads, [&](std::uint64_t b) {
        Compensated s;
        for (std::uint64_t n = block_first(b); n <= block_last(b); ++n) s.add(table.w(n, level));
        totals[static_cast<std::size_t>(b)] = s.value();
    });
    Compensated before;
    std::uint64_t b = 0;
    for (const std::uint64_t N : schedule) {
        for (; block_first(b) + kSummationBlock - 1 < N; ++b)
            before.add(totals[static_cast<std::size_t>(b)]);
        Compensated partial;
        for (std::uint64_t n = block_first(b); n <= N; ++n) partial.add(table.w(n, level));
        const cd A = before.value() + partial.value();
        out.push_back({N, A, std::abs(A)});
    }
    return out;
}

GrowthFit growth_fit(const std::vector<Checkpoint>& checkpoints) {
    GrowthFit fit;
    for (const auto& c : checkpoints) {
        if (c.N == 0) continue;
        if (!fit.checkpoints.empty() && c.N <= fit.checkpoints.back().N)
            throw DomainError("growth_fit: checkpoints must be strictly increasing in N");
        if (c.abs_A >= 1.0) fit.checkpoints.push_back(c);
    }
    const std::size_t n = fit.checkpoints.size();
    if (n < kMinFitPoints)
        throw InsufficientDataError(
            "growth_fit: need at least 8 checkpoints with |A(N)| >= 1, have " + std::to_string(n));

    double mx = 0.0, my = 0.0;
    for (const auto& c : fit.checkpoints) {
        mx += std::log(static_cast<double>(c.N));
        my += std::log(c.abs_A);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& c : fit.checkpoints) {
        const double dx = std::log(static_cast<double>(c.N)) - mx;
        const double dy = std::log(c.abs_A) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw InsufficientDataError("growth_fit: all checkpoints share one N");
    fit.alpha_hat = sxy / sxx;
    const double intercept = my - fit.alpha_hat * mx;
    fit.M_hat = std::exp(intercept);
    double ss_res = 0.0;
    for (const auto& c : fit.checkpoints) {
        const double r =
            std::log(c.abs_A) - (intercept + fit.alpha_hat * std::log(static_cast<double>(c.N)));
        ss_res += r * r;
    }
    fit.fit_quality = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

GridShape grid_shape(std::uint64_t N, double alpha) {
    if (!(alpha > 0.5 && alpha < 1.0)) throw DomainError("grid: alpha must lie in (1/2, 1)");
    const long double Nl = static_cast<long double>(N);
    GridShape g;
    g.J = static_cast<std::uint64_t>(std::floor(std::pow(Nl, static_cast<long double>(alpha))));
    const long double kreal = std::pow(Nl, 1.0L - static_cast<long double>(alpha));
    g.K = static_cast<std::uint64_t>(std::floor(kreal));
    if (g.J == 0 || g.K == 0) throw DomainError("grid: degenerate J*K = 0");
    if (N - g.J * g.K >= g.J) g.K = static_cast<std::uint64_t>(std::ceil(kreal));
    if (g.J * g.K > N) throw DomainError("grid: J*K exceeds N after adjustment");
    g.R_N = N - g.J * g.K;
    return g;
}

GridDiagnostic grid_diagnostic(const CoefficientTable& table, std::uint64_t N, double alpha,
                               const Level& level, unsigned threads) {
    if (N > table.size()) throw RangeError("grid_diagnostic: N exceeds the coefficient table");
    const GridShape shape = grid_shape(N, alpha);
    GridDiagnostic d;
    d.N = N;
    d.alpha = alpha;
    d.J = shape.J;
    d.K = shape.K;
    d.R_N = shape.R_N;

    // Principal arguments of w(n), R_N < n <= N, sorted ascending (ties by n).
    struct Entry {
        double theta;
        std::uint64_t n;
    };
    const std::uint64_t count = N - shape.R_N;
    std::vector<Entry> entries(static_cast<std::size_t>(count));
    for_each_block(block_count(count), threads, [&](std::uint64_t b) {
        const std::uint64_t last = std::min(count, block_first(b) + kSummationBlock - 1);
        for (std::uint64_t i = block_first(b); i <= last; ++i) {
            const std::uint64_t n = shape.R_N + i;
            const double theta = level.is_lambda() ? (table.parity(n) ? std::numbers::pi : 0.0)
                                                   : table.theta(n, level.m(), table.G());
            entries[static_cast<std::size_t>(i - 1)] = {theta, n};
        }
    });
    const cd star =
        blocked_sum(count, threads, [&](std::uint64_t i) { return table.w(shape.R_N + i, level); });
    // (theta, n) keys are unique, so the sorted order is unique.
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.theta < b.theta || (a.theta == b.theta && a.n < b.n);
    });

    // theta_{j,k} sits at sorted position (j-1) K + (k-1); each column is
    // summed on its own in ascending j.
    std::vector<cd> columns(static_cast<std::size_t>(shape.K), cd{0.0, 0.0});
    const std::uint64_t column_groups = (shape.K + kSummationBlock - 1) / kSummationBlock;
    for_each_block(column_groups, threads, [&](std::uint64_t g) {
        const std::uint64_t k_end = std::min(shape.K, (g + 1) * kSummationBlock);
        for (std::uint64_t k = g * kSummationBlock; k < k_end; ++k) {
            cd acc{0.0, 0.0};
            for (std::uint64_t i = k; i < entries.size(); i += shape.K)
                acc += table.w(entries[i].n, level);
            columns[static_cast<std::size_t>(k)] = acc;
        }
    });
    for (const auto& c : columns) {
        const double mag = std::abs(c);
        d.column_magnitude_sum += mag;
        d.max_column_magnitude = std::max(d.max_column_magnitude, mag);
    }
    d.star_sum_magnitude = std::abs(star);
    d.scaled_bound = 2.0 * std::numbers::pi /
                     static_cast<double>(std::pow(static_cast<long double>(N), alpha)) *
                     d.star_sum_magnitude;
    const double slack = 1e-12 * static_cast<double>(std::max<std::uint64_t>(1, N));
    d.chain_holds =
        d.star_sum_magnitude <= d.column_magnitude_sum + slack &&
        d.column_magnitude_sum <= static_cast<double>(shape.K) * d.max_column_magnitude + slack;
    return d;
}

UniformityGap uniformity_gap(const CoefficientTable& table, SeriesPoint s, std::uint64_t N,
                             const Level& m, const Level& q) {
    if (!(s.sigma > 0.0)) throw DomainError("uniformity_gap: sigma must be > 0");
    if (N > table.size()) throw RangeError("uniformity_gap: N exceeds the coefficient table");
    UniformityGap gap;
    if (m == q) {
        gap.holds = true;
        return gap;
    }
    const cd diff = blocked_sum(N, 1, [&](std::uint64_t n) {
        return series_term(table, n, s, m) - series_term(table, n, s, q);
    });
    gap.measured = std::abs(diff);

    // min(m, q) with the lambda level acting as infinity.
    const std::uint64_t smaller =
        m.is_lambda() ? q.m() : (q.is_lambda() ? m.m() : std::min(m.m(), q.m()));
    const cd weight = blocked_sum(N, 1, [&](std::uint64_t n) {
        return cd{std::exp(-s.sigma * std::log(static_cast<double>(n))), 0.0};
    });
    gap.bound = std::numbers::pi / static_cast<double>(smaller) * weight.real();
    gap.holds = gap.measured <= gap.bound;
    return gap;
}

}  // namespace wlab
