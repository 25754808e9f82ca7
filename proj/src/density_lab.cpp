#include "wlab/density_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "wlab/errors.hpp"

namespace wlab {

namespace {

constexpr long double kPiL = std::numbers::pi_v<long double>;
constexpr std::size_t kMaxStages = 100'000;

struct IndexSearch {
    enum class Outcome { Found, None, BeyondBudget } outcome = Outcome::None;
    std::size_t index = 0;
};

// Largest u >= lo with tail(u) > v. Tails are strictly decreasing in u.
IndexSearch last_above(PrimeSeriesTable& table, std::size_t lo, long double v, std::size_t budget) {
    if (lo > budget) return {IndexSearch::Outcome::BeyondBudget, budget};
    if (table.tail(lo) <= v) return {};
    // Gallop to a bracket [good, bad) with tail(good) > v >= tail(bad).
    std::size_t good = lo;
    std::size_t step = 1;
    std::size_t bad = 0;
    while (true) {
        const std::size_t probe = std::min(good + step, budget + 1);
        if (table.tail(probe) <= v) {
            bad = probe;
            break;
        }
        if (probe == budget + 1) return {IndexSearch::Outcome::BeyondBudget, budget};
        good = probe;
        step *= 2;
    }
    while (bad - good > 1) {
        const std::size_t mid = good + (bad - good) / 2;
        if (table.tail(mid) > v)
            good = mid;
        else
            bad = mid;
    }
    return {IndexSearch::Outcome::Found, good};
}

// Smallest u >= lo with tail(u) < v (v > 0).
IndexSearch first_below(PrimeSeriesTable& table, std::size_t lo, long double v,
                        std::size_t budget) {
    if (lo > budget + 1) return {IndexSearch::Outcome::BeyondBudget, budget};
    if (table.tail(lo) < v) return {IndexSearch::Outcome::Found, lo};
    std::size_t good = lo;  // tail(good) >= v
    std::size_t step = 1;
    std::size_t bad = 0;
    while (true) {
        const std::size_t probe = std::min(good + step, budget + 1);
        if (table.tail(probe) < v) {
            bad = probe;
            break;
        }
        if (probe == budget + 1) return {IndexSearch::Outcome::BeyondBudget, budget};
        good = probe;
        step *= 2;
    }
    while (bad - good > 1) {
        const std::size_t mid = good + (bad - good) / 2;
        if (table.tail(mid) < v)
            bad = mid;
        else
            good = mid;
    }
    return {IndexSearch::Outcome::Found, bad};
}

// Largest k >= 0 with scale * psi_fraction(p, k) <= x (k = 0 means none).
std::uint32_t largest_power_below(std::uint64_t p, long double x, long double scale) {
    const long double pl = static_cast<long double>(p);
    auto angle = [&](std::uint32_t k) {
        return scale * static_cast<long double>(psi_fraction_float(p, k));
    };
    const long double ratio = 1.0L - x * pl * pl / scale;
    std::uint32_t k = 1;
    if (ratio > 0.0L) {
        const long double est = std::log(ratio) / std::log1p(-1.0L / pl);
        if (est > 1.0L && est < 4.0e9L) k = static_cast<std::uint32_t>(est);
    }
    while (k > 0 && angle(k) > x) --k;
    while (k < std::numeric_limits<std::uint32_t>::max() - 1 && angle(k + 1) <= x) ++k;
    return k;
}

// Segments can hold millions of primes, far too many for an exact rational
// sum. 128-bit floats keep the accumulated rounding below n * 2^-120.
constexpr mp_bitcnt_t kVerifyBits = 128;

void add_inverse_squares(const std::vector<std::uint64_t>& primes, mpf_class& total) {
    mpf_class term(0, kVerifyBits);
    for (const std::uint64_t q : primes) {
        mpf_set_ui(term.get_mpf_t(), 1);
        if (q >> 32) {
            mpf_div_ui(term.get_mpf_t(), term.get_mpf_t(), static_cast<unsigned long>(q));
            mpf_div_ui(term.get_mpf_t(), term.get_mpf_t(), static_cast<unsigned long>(q));
        } else {
            mpf_div_ui(term.get_mpf_t(), term.get_mpf_t(), static_cast<unsigned long>(q * q));
        }
        total += term;
    }
}

std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

PrimeSeriesTable::PrimeSeriesTable(double G) : G_(G) {
    if (!(G > 0.0)) throw DomainError("PrimeSeriesTable: G must be positive");
    prefix_.push_back(0.0L);
}

void PrimeSeriesTable::ensure(std::size_t count) {
    while (primes_.size() < count) {
        const std::uint64_t lo = primes_.empty() ? 2 : primes_.back() + 1;
        const std::uint64_t width = std::max<std::uint64_t>(1u << 16, lo);
        const auto chunk = primes_in_range(lo, lo + std::min<std::uint64_t>(width, 1u << 24));
        for (const std::uint64_t p : chunk) {
            const long double pl = static_cast<long double>(p);
            const long double term = 1.0L / (pl * pl);
            const long double t = sum_ + term;
            if (std::fabs(sum_) >= std::fabs(term))
                comp_ += (sum_ - t) + term;
            else
                comp_ += (term - t) + sum_;
            sum_ = t;
            primes_.push_back(p);
            prefix_.push_back(sum_ + comp_);
        }
    }
}

std::uint64_t PrimeSeriesTable::prime(std::size_t index) {
    if (index == 0) throw DomainError("prime index is 1-based");
    ensure(index);
    return primes_[index - 1];
}

long double PrimeSeriesTable::prefix(std::size_t b) {
    if (b == 0) throw DomainError("prime index is 1-based");
    ensure(b - 1);
    return prefix_[b - 1];
}

long double PrimeSeriesTable::tail(std::size_t b) {
    return kPiL / G_ * (static_cast<long double>(G_) - prefix(b));
}

std::string to_string(ConstructionStatus status) {
    return status == ConstructionStatus::Converged ? "converged" : "budget-exhausted";
}

bool small_prime_conditions_hold(PrimeSeriesTable& table) {
    const long double scale = kPiL / static_cast<long double>(table.G());
    for (std::size_t index = 1; index <= 3; ++index) {
        const std::uint64_t p = table.prime(index);
        const long double after = table.tail(index + 1);
        if (!(scale * psi_fraction_float(p, 1) < after)) return false;
        if (!(scale * psi_fraction_float(p, 2) < after)) return false;
    }
    return true;
}

Construction approximate_angle(double x, double epsilon, std::size_t prime_budget) {
    PrimeSeriesTable table;
    return approximate_angle(x, epsilon, prime_budget, table);
}

Construction approximate_angle(double x, double epsilon, std::size_t prime_budget,
                               PrimeSeriesTable& table) {
    if (!(x > 0.0 && x < std::numbers::pi))
        throw DomainError("approximate_angle: x must lie in (0, pi)");
    if (!(epsilon > 0.0)) throw DomainError("approximate_angle: epsilon must be > 0");
    if (prime_budget == 0) throw DomainError("approximate_angle: prime_budget must be >= 1");
    static const bool side_conditions = [] {
        PrimeSeriesTable t;
        return small_prime_conditions_hold(t);
    }();
    if (!side_conditions)
        throw StateError("approximate_angle: small-prime side conditions fail for this G");

    Construction c;
    c.target_x = x;
    c.epsilon = epsilon;
    c.prime_budget = prime_budget;
    c.G = table.G();

    const long double scale = kPiL / static_cast<long double>(table.G());
    // Converge against a slightly smaller radius so that an independent
    // recomputation, off by a few ulps, still lands strictly inside epsilon.
    const long double eps = epsilon - std::min(1e-12, epsilon / 1024);
    long double S = 0.0L;
    std::size_t lo = 1;

    auto exhaust = [&](std::string why) {
        c.status = ConstructionStatus::BudgetExhausted;
        c.note = std::move(why);
    };

    for (std::size_t stage = 0;; ++stage) {
        if (stage == kMaxStages) {
            exhaust("stage limit reached");
            break;
        }
        const long double xi = static_cast<long double>(x) - S;
        IterationRecord rec;
        rec.stage = stage;
        rec.x_i = static_cast<double>(xi);

        const auto bsel = last_above(table, lo, xi - eps, prime_budget);
        if (bsel.outcome == IndexSearch::Outcome::BeyondBudget) {
            exhaust("maximal b beyond prime budget at stage " + std::to_string(stage));
            break;
        }
        if (bsel.outcome == IndexSearch::Outcome::None) {
            exhaust("no unused tail exceeds x_i - eps at stage " + std::to_string(stage));
            break;
        }
        const std::size_t b = bsel.index;
        rec.b = b;
        const long double B = table.tail(b);

        if (B > xi + eps) {
            // t maximal with tail(t + 1) > B - (x_i + eps); u = t + 1 >= b.
            const auto usel = last_above(table, b, B - (xi + eps), prime_budget);
            if (usel.outcome != IndexSearch::Outcome::Found) {
                exhaust("maximal t beyond prime budget at stage " + std::to_string(stage));
                break;
            }
            const std::size_t u = usel.index;
            if (u == b) {
                const std::uint64_t p = table.prime(b);
                const std::uint32_t k = largest_power_below(p, xi, scale);
                if (k == 0) {
                    exhaust("no prime power of " + std::to_string(p) + " fits at stage " +
                            std::to_string(stage));
                    break;
                }
                S += scale * static_cast<long double>(psi_fraction_float(p, k));
                c.special_powers.push_back({b, p, k});
                rec.kind = StageKind::PrimePower;
                rec.p = p;
                rec.k = k;
                lo = b + 1;
            } else {
                S += scale * (table.prefix(u) - table.prefix(b));
                c.segments.push_back({b, u - 1, table.prime(b), table.prime(u - 1)});
                rec.kind = StageKind::Segment;
                rec.t = u - 1;
                lo = u;
            }
        } else {
            // B already within eps: smallest t with |x_i - (B - T)| < eps.
            const auto usel = first_below(table, b + 1, B - xi + eps, prime_budget);
            if (usel.outcome != IndexSearch::Outcome::Found) {
                exhaust("minimal t beyond prime budget at stage " + std::to_string(stage));
                break;
            }
            const std::size_t u = usel.index;
            S += scale * (table.prefix(u) - table.prefix(b));
            c.segments.push_back({b, u - 1, table.prime(b), table.prime(u - 1)});
            rec.kind = StageKind::Segment;
            rec.t = u - 1;
            lo = u;
        }

        const long double err = std::fabs(static_cast<long double>(x) - S);
        rec.S = static_cast<double>(S);
        rec.eps = static_cast<double>(err);
        c.iteration_log.push_back(rec);
        if (err < eps) {
            c.status = ConstructionStatus::Converged;
            break;
        }
    }
    c.achieved_S = static_cast<double>(S);
    return c;
}

VerificationResult verify_construction_detailed(const Construction& c) {
    VerificationResult out;
    if (c.segments.empty() && c.special_powers.empty()) {
        out.reason = "empty construction";
        return out;
    }

    std::vector<std::uint64_t> used;
    mpf_class total(0, kVerifyBits);
    for (const auto& seg : c.segments) {
        if (seg.first_index == 0 || seg.last_index < seg.first_index ||
            seg.last_prime < seg.first_prime) {
            out.reason = "malformed segment";
            return out;
        }
        const auto primes = primes_in_range(seg.first_prime, seg.last_prime);
        if (primes.empty() || primes.front() != seg.first_prime ||
            primes.back() != seg.last_prime ||
            primes.size() != seg.last_index - seg.first_index + 1) {
            out.reason = "segment bounds inconsistent with prime indices";
            return out;
        }
        add_inverse_squares(primes, total);
        used.insert(used.end(), primes.begin(), primes.end());
    }
    for (const auto& sp : c.special_powers) {
        const auto check = primes_in_range(sp.p, sp.p);
        if (check.size() != 1 || sp.k == 0) {
            out.reason = "special power is not a prime power";
            return out;
        }
        total += mpf_class(psi_fraction(sp.p, sp.k), kVerifyBits);
        used.push_back(sp.p);
    }

    std::sort(used.begin(), used.end());
    if (std::adjacent_find(used.begin(), used.end()) != used.end()) {
        out.reason = "prime reused";
        return out;
    }

    const long double scale = kPiL / static_cast<long double>(c.G);
    out.recomputed_S = static_cast<double>(scale * static_cast<long double>(total.get_d()));
    if (!(std::fabs(c.target_x - out.recomputed_S) < c.epsilon)) {
        out.reason = "recomputed sum outside epsilon";
        return out;
    }
    out.ok = true;
    return out;
}

bool verify_construction(const Construction& c) { return verify_construction_detailed(c).ok; }

Witness witness(const Construction& c, int parity_target, std::uint32_t k) {
    if (c.status != ConstructionStatus::Converged)
        throw StateError("witness: construction did not converge");
    if (k == 0) throw DomainError("witness: k must be >= 1");
    if (parity_target != 1 && parity_target != -1)
        throw DomainError("witness: parity target must be +1 or -1");

    Witness w;
    std::vector<std::uint64_t> segment_primes;
    for (const auto& seg : c.segments) {
        const auto primes = primes_in_range(seg.first_prime, seg.last_prime);
        segment_primes.insert(segment_primes.end(), primes.begin(), primes.end());
    }
    std::uint64_t largest_used = 0;
    for (const auto p : segment_primes) largest_used = std::max(largest_used, p);
    for (const auto& sp : c.special_powers) largest_used = std::max(largest_used, sp.p);

    const long double scale = kPiL / static_cast<long double>(c.G);
    if (segment_primes.empty()) {
        // Supply one prime q, larger than any used, with scale / q^2 small
        // enough that S + scale / q^2 stays within epsilon of x.
        const long double room =
            static_cast<long double>(c.epsilon) - std::fabs(c.target_x - c.achieved_S);
        auto q_min = static_cast<std::uint64_t>(std::sqrt(scale / room)) + 1;
        q_min = std::max(q_min, largest_used + 1);
        for (std::uint64_t hi = q_min + 64;; hi += 1024) {
            const auto cand = primes_in_range(q_min, hi);
            if (!cand.empty()) {
                w.filler_prime = cand.front();
                break;
            }
        }
        segment_primes.push_back(w.filler_prime);
    }
    std::sort(segment_primes.begin(), segment_primes.end());

    std::vector<PrimePower> factors;
    std::uint64_t special_omega = 0;
    for (const auto& sp : c.special_powers) {
        factors.push_back({sp.p, sp.k});
        special_omega += sp.k;
    }
    const int lambda_special = (special_omega % 2 == 0) ? 1 : -1;
    for (const auto p : segment_primes) factors.push_back({p, 2 * k});
    if (lambda_special != parity_target) {
        const std::uint64_t p = segment_primes.front();
        for (auto& f : factors)
            if (f.p == p) ++f.k;
        w.adjusted_prime = p;
        w.adjustment_shift =
            static_cast<double>(scale * static_cast<long double>(psi_fraction_float(p, 2 * k + 1) -
                                                                 psi_fraction_float(p, 2 * k)));
    }
    std::sort(factors.begin(), factors.end(),
              [](const PrimePower& a, const PrimePower& b) { return a.p < b.p; });
    w.factorization.factors = std::move(factors);
    return w;
}

Factorization witness_factorization(const Construction& c, int parity_target, std::uint32_t k) {
    return witness(c, parity_target, k).factorization;
}

std::string to_trace(const Construction& c) {
    std::ostringstream out;
    for (const auto& r : c.iteration_log) {
        out << r.stage << ' ' << format_g(r.x_i) << ' ' << r.b << ' ';
        if (r.kind == StageKind::Segment)
            out << r.t;
        else
            out << '(' << r.p << ',' << r.k << ')';
        out << ' ' << format_g(r.S) << ' ' << format_g(r.eps) << '\n';
    }
    return out.str();
}

SectorDensityReport sector_density(double x, double y, std::uint64_t N, std::uint64_t m,
                                   const CoefficientTable& table, const SieveTable& sieve) {
    if (m == 0) throw DomainError("sector_density: level m must be >= 1");
    const double width = std::numbers::pi / static_cast<double>(m);
    if (!(x >= 0.0 && x < y && y <= width))
        throw DomainError("sector_density: need 0 <= x < y <= pi/m");
    if (N == 0) throw DomainError("sector_density: N must be >= 1");
    if (N > table.size() || N > sieve.limit())
        throw RangeError("sector_density: N exceeds the coefficient table");

    SectorDensityReport rep{x, y, m, N};
    const double G = table.G();
    const long double to_kernel = static_cast<long double>(m) * G / kPiL;

    // Offset strictly inside (lo, hi), with exact r settling near-boundary cases.
    auto inside = [&](std::uint64_t n, double offset) {
        const bool near =
            std::fabs(offset - x) <= kSectorGuard || std::fabs(offset - y) <= kSectorGuard;
        if (!near) return offset > x && offset < y;
        ++rep.resolved_boundary;
        const ExactAngle exact = exact_theta(sieve.factorize(n));
        mpf_class r(exact.r, 256);
        const long double rl = static_cast<long double>(r.get_d());
        // Compare in kernel units, r against bound * m G / pi.
        const long double lo = static_cast<long double>(x) * to_kernel;
        const long double hi = static_cast<long double>(y) * to_kernel;
        return rl > lo && rl < hi;
    };

    for (std::uint64_t n = 1; n <= N; ++n) {
        const double theta = table.theta(n, m, G);
        if (table.parity(n)) {
            if (inside(n, theta - std::numbers::pi)) ++rep.count_B;
        } else {
            if (inside(n, theta)) ++rep.count_A;
        }
    }
    rep.delta_A = static_cast<double>(rep.count_A) / static_cast<double>(N);
    rep.delta_B = static_cast<double>(rep.count_B) / static_cast<double>(N);
    return rep;
}

}  // namespace wlab
