#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "wlab/wlab.hpp"

namespace py = pybind11;
using namespace wlab;

namespace {

// Levels cross the boundary as an int or the string "inf".
Level to_level(const py::object& o) {
    if (py::isinstance<py::str>(o)) return Level::parse(o.cast<std::string>());
    const auto m = o.cast<long long>();
    if (m < 1) throw DomainError("level m must be >= 1");
    return Level::finite(static_cast<std::uint64_t>(m));
}

py::object level_object(const Level& level) {
    if (level.is_lambda()) return py::str("inf");
    return py::int_(level.m());
}

py::object big_int(const mpz_class& z) {
    return py::reinterpret_steal<py::object>(PyLong_FromString(z.get_str().c_str(), nullptr, 10));
}

py::object fraction(const mpq_class& q) {
    // Leaked on purpose: a static py::object would be released after finalization.
    static const auto* Fraction = new py::object(py::module_::import("fractions").attr("Fraction"));
    return (*Fraction)(big_int(q.get_num()), big_int(q.get_den()));
}

Factorization to_factorization(const std::vector<std::pair<std::uint64_t, std::uint32_t>>& pk) {
    Factorization f;
    for (const auto& [p, k] : pk) f.factors.push_back({p, k});
    if (!f.is_canonical())
        throw DomainError("factorization must list increasing primes with exponents >= 1");
    return f;
}

py::list factor_list(const Factorization& f) {
    py::list out;
    for (const auto& [p, k] : f.factors) out.append(py::make_tuple(p, k));
    return out;
}

py::dict construction_dict(const Construction& c) {
    py::list segments, powers, log;
    for (const auto& s : c.segments)
        segments.append(
            py::dict(py::arg("first_index") = s.first_index, py::arg("last_index") = s.last_index,
                     py::arg("first_prime") = s.first_prime, py::arg("last_prime") = s.last_prime));
    for (const auto& sp : c.special_powers) powers.append(py::make_tuple(sp.p, sp.k));
    for (const auto& r : c.iteration_log) {
        py::dict d(py::arg("stage") = r.stage, py::arg("x") = r.x_i, py::arg("b") = r.b,
                   py::arg("S") = r.S, py::arg("eps") = r.eps);
        if (r.kind == StageKind::Segment)
            d["t"] = r.t;
        else
            d["power"] = py::make_tuple(r.p, r.k);
        log.append(d);
    }
    return py::dict(py::arg("x") = c.target_x, py::arg("epsilon") = c.epsilon,
                    py::arg("prime_budget") = c.prime_budget, py::arg("G") = c.G,
                    py::arg("status") = to_string(c.status), py::arg("S") = c.achieved_S,
                    py::arg("segments") = segments, py::arg("special_powers") = powers,
                    py::arg("log") = log, py::arg("trace") = to_trace(c), py::arg("note") = c.note);
}

// Rebuilds the C++ construction from the dict handed out above, so
// verify/witness can run on what Python holds.
Construction construction_from(const py::dict& d) {
    Construction c;
    c.target_x = d["x"].cast<double>();
    c.epsilon = d["epsilon"].cast<double>();
    c.prime_budget = d["prime_budget"].cast<std::size_t>();
    c.G = d["G"].cast<double>();
    c.achieved_S = d["S"].cast<double>();
    c.status = d["status"].cast<std::string>() == to_string(ConstructionStatus::Converged)
                   ? ConstructionStatus::Converged
                   : ConstructionStatus::BudgetExhausted;
    for (const auto& item : d["segments"]) {
        const auto s = item.cast<py::dict>();
        c.segments.push_back(
            {s["first_index"].cast<std::size_t>(), s["last_index"].cast<std::size_t>(),
             s["first_prime"].cast<std::uint64_t>(), s["last_prime"].cast<std::uint64_t>()});
    }
    for (const auto& item : d["special_powers"]) {
        const auto [p, k] = item.cast<std::pair<std::uint64_t, std::uint32_t>>();
        c.special_powers.push_back({0, p, k});
    }
    return c;
}

py::dict checkpoint_dict(const Checkpoint& c) {
    return py::dict(py::arg("N") = c.N, py::arg("A") = c.A, py::arg("abs_A") = c.abs_A);
}

// Sieve plus float coefficient table up to N; everything indexed by n.
class Lab {
public:
    Lab(std::uint64_t N, std::optional<std::string> cache_dir)
        : sieve_(cache_dir ? sieve_cache::load_or_build(std::max<std::uint64_t>(N, 2), *cache_dir)
                           : SieveTable(std::max<std::uint64_t>(N, 2))),
          table_(sieve_, N) {}

    std::uint64_t N() const { return table_.size(); }
    const SieveTable& sieve() const { return sieve_; }
    const CoefficientTable& table() const { return table_; }

    py::array_t<std::complex<double>> w_values(const Level& level) const {
        py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(N() + 1));
        auto v = out.mutable_unchecked<1>();
        v(0) = 0.0;
        for (std::uint64_t n = 1; n <= N(); ++n) v(n) = table_.w(n, level);
        return out;
    }

    py::array_t<double> theta(std::uint64_t m) const {
        if (m == 0) throw DomainError("level m must be >= 1");
        py::array_t<double> out(static_cast<py::ssize_t>(N() + 1));
        auto v = out.mutable_unchecked<1>();
        v(0) = 0.0;
        for (std::uint64_t n = 1; n <= N(); ++n) v(n) = table_.theta(n, m, table_.G());
        return out;
    }

private:
    SieveTable sieve_;
    CoefficientTable table_;
};

}  // namespace

PYBIND11_MODULE(_wlab, m) {
    m.doc() =
        "Generalized Liouville coefficients w_m(n): exact angles, density constructions, "
        "partial sums and growth diagnostics.";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<RangeError>(m, "RangeError", PyExc_ValueError);
    py::register_exception<SizingError>(m, "SizingError", PyExc_ValueError);
    py::register_exception<PrecisionError>(m, "PrecisionError", PyExc_ValueError);
    py::register_exception<InsufficientDataError>(m, "InsufficientDataError", PyExc_ValueError);
    py::register_exception<StateError>(m, "StateError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def("G", &canonical_G, "P(2) = sum over primes of p^-2, to double precision.");
    m.def(
        "compute_G",
        [](const std::string& method, double precision) {
            GMethod gm;
            if (method == to_string(GMethod::DirectTail))
                gm = GMethod::DirectTail;
            else if (method == to_string(GMethod::MoebiusLogZeta))
                gm = GMethod::MoebiusLogZeta;
            else
                throw DomainError("compute_G: method is 'direct-tail' or 'moebius-log-zeta'");
            const auto v = compute_G(gm, precision);
            return py::dict(py::arg("value") = v.value, py::arg("error_bound") = v.error_bound,
                            py::arg("method") = method, py::arg("cutoff") = v.cutoff);
        },
        py::arg("method") = "moebius-log-zeta", py::arg("precision") = 1e-12);

    m.def(
        "psi_fraction",
        [](std::uint64_t p, std::uint32_t k) { return fraction(psi_fraction(p, k)); }, py::arg("p"),
        py::arg("k"), "(p^k - (p-1)^k) / p^(k+2) as a Fraction.");
    m.def(
        "exact_theta",
        [](const std::vector<std::pair<std::uint64_t, std::uint32_t>>& factors) {
            const auto a = exact_theta(to_factorization(factors));
            return py::make_tuple(a.parity ? 1 : 0, fraction(a.r));
        },
        py::arg("factors"),
        "(parity, r) for n given as [(p, k), ...]; theta_m = parity*pi + pi/(m G) * r.");
    m.def(
        "theta",
        [](const std::vector<std::pair<std::uint64_t, std::uint32_t>>& factors,
           std::uint64_t level) {
            return theta_float(to_factorization(factors), level, canonical_G());
        },
        py::arg("factors"), py::arg("m"));
    m.def(
        "zeta",
        [](std::complex<double> s) {
            const auto z = zeta(s);
            return py::make_tuple(z.value, z.error_bound);
        },
        py::arg("s"), "Riemann zeta and an error bound, Re(s) > 1.");

    m.def(
        "approximate_angle",
        [](double x, double epsilon, std::size_t budget) {
            Construction c;
            {
                py::gil_scoped_release release;
                c = approximate_angle(x, epsilon, budget);
            }
            return construction_dict(c);
        },
        py::arg("x"), py::arg("epsilon"), py::arg("prime_budget") = kDefaultPrimeBudget);
    m.def(
        "verify_construction",
        [](const py::dict& d) {
            const auto c = construction_from(d);
            VerificationResult v;
            {
                py::gil_scoped_release release;
                v = verify_construction_detailed(c);
            }
            return py::make_tuple(v.ok, v.recomputed_S, v.reason);
        },
        py::arg("construction"));
    m.def(
        "witness",
        [](const py::dict& d, int parity, std::uint32_t k) {
            const auto w = witness(construction_from(d), parity, k);
            return py::dict(py::arg("factors") = factor_list(w.factorization),
                            py::arg("adjusted_prime") = w.adjusted_prime,
                            py::arg("adjustment_shift") = w.adjustment_shift,
                            py::arg("filler_prime") = w.filler_prime);
        },
        py::arg("construction"), py::arg("parity"), py::arg("k"));
    m.def(
        "euler_product",
        [](double sigma, double t, std::uint64_t prime_cutoff, std::uint32_t k_max,
           const py::object& level) {
            const auto e = euler_product({sigma, t}, prime_cutoff, k_max, to_level(level));
            return py::make_tuple(e.value, e.truncation_bound);
        },
        py::arg("sigma"), py::arg("t") = 0.0, py::arg("prime_cutoff") = 10000,
        py::arg("k_max") = 60, py::arg("m") = "inf");
    m.def(
        "checkpoint_schedule",
        [](std::uint64_t N, double ratio) { return checkpoint_schedule(N, ratio); }, py::arg("N"),
        py::arg("ratio") = kCheckpointRatio);

    py::class_<Lab>(m, "Lab", "Sieve and coefficient table for 1 <= n <= N.")
        .def(py::init<std::uint64_t, std::optional<std::string>>(), py::arg("N"),
             py::arg("cache_dir") = py::none(), py::call_guard<py::gil_scoped_release>())
        .def_property_readonly("N", &Lab::N)
        .def("spf",
             [](const Lab& lab, std::uint64_t n) {
                 if (n > lab.sieve().limit()) throw RangeError("spf: n outside the sieve");
                 return lab.sieve().spf(n);
             })
        .def("factorize",
             [](const Lab& lab, std::uint64_t n) { return factor_list(lab.sieve().factorize(n)); })
        .def("liouville",
             [](const Lab& lab, std::uint64_t n) {
                 if (n == 0 || n > lab.N()) throw RangeError("liouville: n outside [1, N]");
                 return lab.table().lambda(n);
             })
        .def(
            "w_values",
            [](const Lab& lab, const py::object& level) { return lab.w_values(to_level(level)); },
            py::arg("m"), "Array of length N + 1; entry n is w_m(n), entry 0 is 0.")
        .def("theta", &Lab::theta, py::arg("m"))
        .def(
            "partial_sum",
            [](const Lab& lab, double sigma, double t, const py::object& level,
               std::optional<std::uint64_t> N, unsigned threads) {
                const Level l = to_level(level);
                py::gil_scoped_release release;
                return partial_sum(lab.table(), {sigma, t}, N.value_or(lab.N()), l, threads).value;
            },
            py::arg("sigma"), py::arg("t") = 0.0, py::arg("m") = "inf", py::arg("N") = py::none(),
            py::arg("threads") = 1)
        .def(
            "uniformity_gap",
            [](const Lab& lab, double sigma, double t, const py::object& a, const py::object& b) {
                const auto g =
                    uniformity_gap(lab.table(), {sigma, t}, lab.N(), to_level(a), to_level(b));
                return py::dict(py::arg("measured") = g.measured, py::arg("bound") = g.bound,
                                py::arg("holds") = g.holds);
            },
            py::arg("sigma"), py::arg("t"), py::arg("m"), py::arg("q"))
        .def(
            "checkpoints",
            [](const Lab& lab, const py::object& level, double ratio, unsigned threads) {
                const Level l = to_level(level);
                std::vector<Checkpoint> cps;
                {
                    py::gil_scoped_release release;
                    cps = summatory_checkpoints(lab.table(), lab.N(), l, ratio, threads);
                }
                py::list out;
                for (const auto& c : cps) out.append(checkpoint_dict(c));
                return out;
            },
            py::arg("m"), py::arg("ratio") = kCheckpointRatio, py::arg("threads") = 1)
        .def(
            "growth_fit",
            [](const Lab& lab, const py::object& level, unsigned threads) {
                const Level l = to_level(level);
                GrowthFit fit;
                {
                    py::gil_scoped_release release;
                    fit = growth_fit(
                        summatory_checkpoints(lab.table(), lab.N(), l, kCheckpointRatio, threads));
                }
                return py::dict(py::arg("m") = level_object(l),
                                py::arg("alpha_hat") = fit.alpha_hat, py::arg("M_hat") = fit.M_hat,
                                py::arg("r2") = fit.fit_quality,
                                py::arg("n_points") = fit.checkpoints.size());
            },
            py::arg("m"), py::arg("threads") = 1)
        .def(
            "grid",
            [](const Lab& lab, double alpha, const py::object& level, unsigned threads) {
                const Level l = to_level(level);
                GridDiagnostic d;
                {
                    py::gil_scoped_release release;
                    d = grid_diagnostic(lab.table(), lab.N(), alpha, l, threads);
                }
                return py::dict(py::arg("N") = d.N, py::arg("alpha") = d.alpha, py::arg("J") = d.J,
                                py::arg("K") = d.K, py::arg("R_N") = d.R_N,
                                py::arg("max_column_magnitude") = d.max_column_magnitude,
                                py::arg("column_magnitude_sum") = d.column_magnitude_sum,
                                py::arg("star_sum_magnitude") = d.star_sum_magnitude,
                                py::arg("scaled_bound") = d.scaled_bound,
                                py::arg("chain_holds") = d.chain_holds);
            },
            py::arg("alpha"), py::arg("m") = 1, py::arg("threads") = 1)
        .def(
            "sector_density",
            [](const Lab& lab, double x, double y, std::uint64_t level) {
                const auto r = sector_density(x, y, lab.N(), level, lab.table(), lab.sieve());
                return py::make_tuple(r.delta_A, r.delta_B);
            },
            py::arg("x"), py::arg("y"), py::arg("m") = 1,
            "Empirical densities of theta_m in (x, y) and in (x + pi, y + pi).")
        .def(
            "duplicates",
            [](const Lab& lab) {
                py::list out;
                for (const auto& g : injectivity_scan(lab.N(), lab.sieve()).duplicates)
                    out.append(g.members);
                return out;
            },
            "Groups of n <= N sharing an exact angle (N <= 10^6).");
}
