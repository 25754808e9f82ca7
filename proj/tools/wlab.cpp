// wlab: command-line driver.
//
// Exit codes: 0 success, 2 invalid parameters, 3 a computation finding
// (failed cross-check, unverified or budget-exhausted construction, duplicates, broken chain),
// 4 I/O failure. Errors are reported on stderr as one JSON object.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wlab/wlab.hpp"

using namespace wlab;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitFinding = 3;
constexpr int kExitIo = 4;

// Options shared by every subcommand. None of them changes numeric output,
// so none enters the config hash.
struct Common {
    std::string config_file;
    std::string out = "wlab_out";
    unsigned threads = 1;
    std::string cache_dir;
    bool no_cache = false;
};

// Options in this help group must come from the command line or the config
// file; CLI11's own required() would reject values supplied by the config.
const std::string kRequired = "Required";

const std::vector<std::string> kExecutionKeys = {"config",    "out",      "threads",
                                                 "cache-dir", "no-cache", "help"};

struct Run {
    std::string command;
    Common common;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    io::Config config;  // effective experiment parameters
    std::uint64_t sieve_limit = 0;
    std::vector<std::string> outputs;
    bool finding = false;

    fs::path path(const std::string& name) const { return fs::path(common.out) / name; }

    void write(const std::string& name, const std::string& content) {
        io::write_atomic(path(name), content);
        outputs.push_back(name);
    }

    int finish() {
        io::RunManifest m;
        m.command = command;
        m.config = config;
        m.G = canonical_G();
        m.sieve_limit = sieve_limit;
        m.threads = common.threads;
        m.outputs = outputs;
        m.status = finding ? "finding" : "ok";
        m.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        io::write_atomic(path(command + ".manifest.json"), io::to_json(m));
        std::cout << "manifest: " << path(command + ".manifest.json").string() << "\n";
        return finding ? kExitFinding : kExitOk;
    }

    SieveTable sieve(std::uint64_t limit) {
        sieve_limit = std::max<std::uint64_t>(limit, 2);
        if (common.no_cache) return SieveTable(sieve_limit);
        const fs::path dir = common.cache_dir.empty() ? sieve_cache::default_directory()
                                                      : fs::path(common.cache_dir);
        return sieve_cache::load_or_build(sieve_limit, dir);
    }
};

void error_record(const std::string& kind, const std::string& message, int code) {
    nlohmann::ordered_json j;
    j["error"] = {{"kind", kind}, {"message", message}, {"exit_code", code}};
    std::cerr << j.dump() << "\n";
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_file, "flat key = value file; flags override it");
    sub->add_option("--out", c.out, "output directory")->capture_default_str();
    sub->add_option("--threads", c.threads, "worker threads (outputs do not depend on it)")
        ->check(CLI::Range(1u, 256u))
        ->capture_default_str();
    sub->add_option("--cache-dir", c.cache_dir, "sieve cache directory (default: $WLAB_CACHE_DIR)");
    sub->add_flag("--no-cache", c.no_cache, "build the sieve in memory only");
}

std::string option_key(const CLI::Option* o) {
    auto name = o->get_name(false, false);
    if (!o->get_lnames().empty()) name = o->get_lnames().front();
    return name;
}

// Applies config-file values to options the command line left unset, then
// records every experiment parameter for the manifest.
void merge_config(CLI::App* sub, Run& run) {
    if (!run.common.config_file.empty()) {
        for (const auto& [key, value] : io::read_config(run.common.config_file)) {
            auto* opt = sub->get_option_no_throw("--" + key);
            if (!opt || key == "config" || key == "help")
                throw DomainError("config: unknown key '" + key + "' for " + run.command);
            if (opt->count() > 0) continue;
            try {
                if (opt->get_items_expected_max() > 1) {
                    std::stringstream ss(value);
                    for (std::string item; std::getline(ss, item, ',');) opt->add_result(item);
                } else {
                    opt->add_result(value);
                }
                opt->run_callback();
            } catch (const CLI::Error& e) {
                throw DomainError("config: " + key + ": " + e.what());
            }
        }
    }
    for (const auto* opt : sub->get_options()) {
        const auto key = option_key(opt);
        if (opt->get_group() == kRequired && opt->count() == 0)
            throw DomainError("--" + key + " is required");
        if (std::find(kExecutionKeys.begin(), kExecutionKeys.end(), key) != kExecutionKeys.end())
            continue;
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
        } else {
            value = opt->get_default_str();
        }
        run.config[key] = value;
    }
}

std::vector<Level> parse_levels(const std::vector<std::string>& texts) {
    std::vector<Level> out;
    for (const auto& t : texts) out.push_back(Level::parse(t));
    if (out.empty()) throw DomainError("at least one level is required");
    return out;
}

std::string f17(double v) { return io::format_double(v); }

// ---------------------------------------------------------------------------

struct ConstantsArgs {
    double direct_precision = 1e-7;
    double moebius_precision = 1e-12;
};

int cmd_constants(Run& run, const ConstantsArgs& a) {
    const auto direct = compute_G(GMethod::DirectTail, a.direct_precision);
    const auto moebius = compute_G(GMethod::MoebiusLogZeta, a.moebius_precision);
    const double diff = std::fabs(direct.value - moebius.value);
    const bool agree = diff <= direct.error_bound + moebius.error_bound;

    nlohmann::ordered_json j;
    auto entry = [](const PrimeZetaValue& v) {
        return nlohmann::ordered_json{{"method", std::string(to_string(v.method))},
                                      {"value", f17(v.value)},
                                      {"error_bound", f17(v.error_bound)},
                                      {"cutoff", v.cutoff}};
    };
    j["G"] = {entry(direct), entry(moebius)};
    j["abs_difference"] = f17(diff);
    j["agree"] = agree;
    j["pi_over_G"] = f17(std::numbers::pi / moebius.value);
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    run.write("constants.json", text);
    run.finding = !agree;
    return run.finish();
}

struct WvaluesArgs {
    std::uint64_t N = 0;
    std::string level = "1";
};

int cmd_wvalues(Run& run, const WvaluesArgs& a) {
    const Level level = Level::parse(a.level);
    const auto sieve = run.sieve(a.N);
    const double G = canonical_G();
    io::AtomicFile file(run.path("wvalues.csv"));
    auto& out = file.stream();
    out << "n,lambda,parity,r_num,r_den,theta,re_w,im_w\n";
    for (std::uint64_t n = 1; n <= a.N; ++n) {
        const auto f = sieve.factorize(n);
        const auto angle = exact_theta(f);
        const double theta = level.is_lambda() ? (angle.parity ? std::numbers::pi : 0.0)
                                               : theta_float(f, level.m(), G);
        const auto w = w_value(f, level);
        out << n << ',' << (angle.parity ? -1 : 1) << ',' << (angle.parity ? 1 : 0) << ','
            << angle.r.get_num().get_str() << ',' << angle.r.get_den().get_str() << ','
            << f17(theta) << ',' << f17(w.real()) << ',' << f17(w.imag()) << '\n';
    }
    file.commit();
    run.outputs.push_back("wvalues.csv");
    std::cout << a.N << " rows written to " << run.path("wvalues.csv").string() << "\n";
    return run.finish();
}

struct DensityArgs {
    std::vector<double> x;
    std::vector<double> grid;  // lo, hi, count
    double epsilon = 1e-3;
    std::size_t budget = kDefaultPrimeBudget;
    int parity = 1;
    std::vector<std::uint32_t> witness_k;
};

int cmd_density(Run& run, const DensityArgs& a) {
    std::vector<double> xs = a.x;
    if (!a.grid.empty()) {
        if (a.grid.size() != 3 || a.grid[2] < 1 || a.grid[2] != std::floor(a.grid[2]))
            throw DomainError("--grid expects LO HI COUNT");
        const int count = static_cast<int>(a.grid[2]);
        for (int i = 0; i < count; ++i)
            xs.push_back(a.grid[0] + (a.grid[1] - a.grid[0]) * (i + 1) / (count + 1));
    }
    if (xs.empty()) throw DomainError("density: give --x or --grid");
    if (a.parity != 1 && a.parity != -1) throw DomainError("--parity must be 1 or -1");
    for (double x : xs)
        if (!(x > 0.0 && x < std::numbers::pi)) throw DomainError("density: x must lie in (0, pi)");

    PrimeSeriesTable table;
    std::ostringstream csv, traces, wit;
    csv << "x,epsilon,budget,status,achieved_S,abs_error,stages,n_segments,n_special,verified,"
           "recomputed_S\n";
    wit << "x,k,parity_target,lambda,theta,adjusted_prime,adjustment_shift,filler_prime\n";
    int unverified = 0, exhausted = 0;
    for (double x : xs) {
        const auto c = approximate_angle(x, a.epsilon, a.budget, table);
        const auto v = verify_construction_detailed(c);
        unverified += !v.ok;
        exhausted += c.status != ConstructionStatus::Converged;
        csv << f17(x) << ',' << f17(a.epsilon) << ',' << a.budget << ',' << to_string(c.status)
            << ',' << f17(c.achieved_S) << ',' << f17(std::fabs(x - c.achieved_S)) << ','
            << c.iteration_log.size() << ',' << c.segments.size() << ',' << c.special_powers.size()
            << ',' << (v.ok ? 1 : 0) << ',' << f17(v.recomputed_S) << '\n';
        traces << "# x=" << f17(x) << " epsilon=" << f17(a.epsilon)
               << " status=" << to_string(c.status) << (c.note.empty() ? "" : " note=" + c.note)
               << '\n'
               << to_trace(c);
        if (c.status != ConstructionStatus::Converged) continue;
        for (const auto k : a.witness_k) {
            const auto w = witness(c, a.parity, k);
            const auto angle = exact_theta(w.factorization);
            const double theta = (angle.parity ? std::numbers::pi : 0.0) +
                                 std::numbers::pi / c.G * mpf_class(angle.r, 128).get_d();
            wit << f17(x) << ',' << k << ',' << a.parity << ',' << liouville(w.factorization) << ','
                << f17(theta) << ',' << w.adjusted_prime << ',' << f17(w.adjustment_shift) << ','
                << w.filler_prime << '\n';
        }
    }
    run.write("density.csv", csv.str());
    run.write("traces.txt", traces.str());
    if (!a.witness_k.empty()) run.write("witnesses.csv", wit.str());
    std::cout << xs.size() << " constructions, " << xs.size() - unverified << " verified, "
              << exhausted << " out of budget\n";
    run.finding = unverified > 0 || exhausted > 0;
    return run.finish();
}

struct SectorArgs {
    double x = 0.0, y = 0.0;
    std::uint64_t N = 0;
    std::uint64_t m = 1;
};

int cmd_sector(Run& run, const SectorArgs& a) {
    if (a.m == 0) throw DomainError("--m must be >= 1");
    const double width = std::numbers::pi / static_cast<double>(a.m);
    if (!(a.x >= 0.0 && a.x < a.y && a.y <= width))
        throw DomainError("sector: need 0 <= x < y <= pi/m");
    const auto sieve = run.sieve(a.N);
    const CoefficientTable table(sieve, a.N);
    const auto r = sector_density(a.x, a.y, a.N, a.m, table, sieve);
    const double gap = std::fabs(r.delta_A - r.delta_B);
    std::ostringstream csv;
    csv << "x,y,m,N,count_A,count_B,delta_A,delta_B,abs_gap,resolved_boundary\n"
        << f17(r.x) << ',' << f17(r.y) << ',' << r.m << ',' << r.N << ',' << r.count_A << ','
        << r.count_B << ',' << f17(r.delta_A) << ',' << f17(r.delta_B) << ',' << f17(gap) << ','
        << r.resolved_boundary << '\n';
    run.write("sector.csv", csv.str());
    std::cout << "delta_A=" << f17(r.delta_A) << " delta_B=" << f17(r.delta_B)
              << " |difference|=" << f17(gap) << "\n";
    return run.finish();
}

struct SeriesArgs {
    std::vector<double> sigma{2.0};
    std::vector<double> t{0.0};
    std::uint64_t N = 0;
    std::vector<std::string> levels{"inf"};
    std::string q;
    std::uint64_t euler_primes = 0;
    std::uint32_t kmax = 60;
};

int cmd_series(Run& run, const SeriesArgs& a) {
    const auto levels = parse_levels(a.levels);
    std::optional<Level> q;
    if (!a.q.empty()) q = Level::parse(a.q);
    for (double s : a.sigma)
        if (!(s > 0.0)) throw DomainError("--sigma values must be > 0");
    if (a.euler_primes > 0)
        for (double s : a.sigma)
            if (!(s > 1.0)) throw DomainError("--euler-primes needs every sigma > 1");

    const auto sieve = run.sieve(a.N);
    const CoefficientTable table(sieve, a.N);
    std::ostringstream csv;
    csv << "m,N,sigma,t,re_F,im_F,abs_F";
    if (a.euler_primes > 0) csv << ",re_euler,im_euler,euler_truncation_bound";
    csv << '\n';
    std::vector<io::GapRow> gaps;
    bool broken = false;
    for (const auto& level : levels)
        for (double sigma : a.sigma)
            for (double t : a.t) {
                const SeriesPoint s{sigma, t};
                const auto rec = partial_sum(table, s, a.N, level, run.common.threads);
                csv << level.to_string() << ',' << a.N << ',' << f17(sigma) << ',' << f17(t) << ','
                    << f17(rec.value.real()) << ',' << f17(rec.value.imag()) << ','
                    << f17(std::abs(rec.value));
                if (a.euler_primes > 0) {
                    const auto e = euler_product(s, a.euler_primes, a.kmax, level);
                    csv << ',' << f17(e.value.real()) << ',' << f17(e.value.imag()) << ','
                        << f17(e.truncation_bound);
                }
                csv << '\n';
                if (level.is_lambda() && sigma > 1.0) {
                    const auto ref = zeta_ratio_ref(s.s());
                    std::cout << "m=inf s=" << f17(sigma) << "+" << f17(t)
                              << "i: F_N=" << f17(rec.value.real()) << "+" << f17(rec.value.imag())
                              << "i  zeta(2s)/zeta(s)=" << f17(ref.real()) << "+" << f17(ref.imag())
                              << "i  |diff|=" << f17(std::abs(rec.value - ref)) << "\n";
                }
                if (q) {
                    const auto g = uniformity_gap(table, s, a.N, level, *q);
                    broken = broken || !g.holds;
                    gaps.push_back({s, a.N, level, *q, g});
                }
            }
    run.write("series.csv", csv.str());
    if (q) run.write("gaps.csv", io::gaps_csv(gaps));
    run.finding = broken;
    return run.finish();
}

struct GrowthArgs {
    std::uint64_t N = 0;
    std::vector<std::string> levels{"1", "inf"};
    double ratio = kCheckpointRatio;
};

int cmd_growth(Run& run, const GrowthArgs& a) {
    const auto levels = parse_levels(a.levels);
    const auto sieve = run.sieve(a.N);
    const CoefficientTable table(sieve, a.N);
    std::string checkpoints;
    std::vector<std::pair<Level, GrowthFit>> fits;
    for (const auto& level : levels) {
        const auto cps = summatory_checkpoints(table, a.N, level, a.ratio, run.common.threads);
        const auto block = io::checkpoints_csv(level, cps);
        checkpoints += checkpoints.empty() ? block : block.substr(block.find('\n') + 1);
        fits.emplace_back(level, growth_fit(cps));
    }
    // Everything computed before anything is written.
    run.write("checkpoints.csv", checkpoints);
    run.write("fits.csv", io::fits_csv(fits));
    for (const auto& [level, fit] : fits)
        std::cout << "m=" << level.to_string() << " alpha_hat=" << f17(fit.alpha_hat)
                  << " M_hat=" << f17(fit.M_hat) << " r2=" << f17(fit.fit_quality)
                  << " points=" << fit.checkpoints.size() << "\n";
    return run.finish();
}

struct GridArgs {
    std::uint64_t N = 0;
    std::vector<double> alpha{0.6, 0.75, 0.9};
    std::vector<std::string> levels{"1"};
};

int cmd_grid(Run& run, const GridArgs& a) {
    const auto levels = parse_levels(a.levels);
    for (double alpha : a.alpha) grid_shape(std::max<std::uint64_t>(a.N, 1), alpha);
    const auto sieve = run.sieve(a.N);
    const CoefficientTable table(sieve, a.N);
    std::vector<std::pair<Level, GridDiagnostic>> rows;
    bool chains = true;
    for (const auto& level : levels)
        for (double alpha : a.alpha) {
            const auto d = grid_diagnostic(table, a.N, alpha, level, run.common.threads);
            chains = chains && d.chain_holds;
            rows.emplace_back(level, d);
            std::cout << "m=" << level.to_string() << " alpha=" << f17(alpha) << " J=" << d.J
                      << " K=" << d.K << " R_N=" << d.R_N << " scaled_bound=" << f17(d.scaled_bound)
                      << (d.chain_holds ? "" : " CHAIN BROKEN") << "\n";
        }
    run.write("grid.csv", io::grid_csv(rows));
    run.finding = !chains;
    return run.finish();
}

struct InjectArgs {
    std::uint64_t N = 0;
};

int cmd_inject(Run& run, const InjectArgs& a) {
    const auto sieve = run.sieve(a.N);
    const auto report = injectivity_scan(a.N, sieve);
    std::ostringstream csv;
    csv << "parity,r_num,r_den,members\n";
    for (const auto& g : report.duplicates) {
        csv << (g.angle.parity ? 1 : 0) << ',' << g.angle.r.get_num().get_str() << ','
            << g.angle.r.get_den().get_str() << ',';
        for (std::size_t i = 0; i < g.members.size(); ++i) csv << (i ? " " : "") << g.members[i];
        csv << '\n';
    }
    run.write("inject.csv", csv.str());
    std::cout << report.duplicates.size() << " duplicates among n <= " << a.N << "\n";
    run.finding = !report.duplicates.empty();
    return run.finish();
}

struct CacheArgs {
    std::string action;
    std::uint64_t limit = 0;
};

int cmd_cache(Run& run, const CacheArgs& a) {
    const fs::path dir = run.common.cache_dir.empty() ? sieve_cache::default_directory()
                                                      : fs::path(run.common.cache_dir);
    if (a.action == "path") {
        std::cout << dir.string() << "\n";
        return kExitOk;
    }
    if (a.action == "list") {
        std::error_code ec;
        if (fs::is_directory(dir, ec))
            for (const auto& e : fs::directory_iterator(dir))
                if (e.path().extension() == ".wlab")
                    std::cout << e.path().filename().string() << " " << e.file_size() << "\n";
        return kExitOk;
    }
    if (a.action == "clear") {
        std::error_code ec;
        std::uintmax_t removed = 0;
        if (fs::is_directory(dir, ec))
            for (const auto& e : fs::directory_iterator(dir))
                if (e.path().extension() == ".wlab") removed += fs::remove(e.path(), ec);
        std::cout << removed << " cache files removed from " << dir.string() << "\n";
        return kExitOk;
    }
    if (a.limit < 2) throw DomainError("cache " + a.action + ": --limit must be >= 2");
    if (a.action == "build") {
        const SieveTable table(a.limit);
        sieve_cache::write(table, sieve_cache::path_for(dir, a.limit));
        run.sieve_limit = a.limit;
        std::cout << "wrote " << sieve_cache::path_for(dir, a.limit).string() << "\n";
        return kExitOk;
    }
    // verify
    const auto table = sieve_cache::read(sieve_cache::path_for(dir, a.limit));
    const bool ok = table.validate();
    std::cout << (ok ? "valid" : "INVALID") << " " << sieve_cache::path_for(dir, a.limit).string()
              << "\n";
    return ok ? kExitOk : kExitFinding;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wlab: generalized Liouville coefficients, density constructions and series"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "wlab 1.0.0");

    Run run;
    std::function<int()> action;

    ConstantsArgs ca;
    auto* constants = app.add_subcommand("constants", "G by both methods, with error bounds");
    constants->add_option("--direct-precision", ca.direct_precision)->capture_default_str();
    constants->add_option("--moebius-precision", ca.moebius_precision)->capture_default_str();
    constants->callback([&] { action = [&] { return cmd_constants(run, ca); }; });

    WvaluesArgs wa;
    auto* wvalues = app.add_subcommand("wvalues", "exact and float w_m(n) for n <= N");
    wvalues->add_option("--N", wa.N)
        ->group(kRequired)
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{kMaxSieveLimit}));
    wvalues->add_option("--m", wa.level, "level: positive integer or inf")->capture_default_str();
    wvalues->callback([&] { action = [&] { return cmd_wvalues(run, wa); }; });

    DensityArgs da;
    auto* density = app.add_subcommand("density", "greedy angle constructions and witnesses");
    density->add_option("--x", da.x, "target angles in (0, pi)")->delimiter(',');
    density->add_option("--grid", da.grid, "LO HI COUNT: COUNT interior points")
        ->expected(3)
        ->delimiter(',');
    density->add_option("--epsilon", da.epsilon)->capture_default_str()->check(CLI::PositiveNumber);
    density->add_option("--budget", da.budget, "largest prime index")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    density->add_option("--parity", da.parity, "lambda of the witnesses, 1 or -1")
        ->capture_default_str();
    density->add_option("--witness-k", da.witness_k, "k values for witness angles")->delimiter(',');
    density->callback([&] { action = [&] { return cmd_density(run, da); }; });

    SectorArgs sa;
    auto* sector = app.add_subcommand("sector", "empirical densities of two sector arcs");
    sector->add_option("--x", sa.x)->group(kRequired);
    sector->add_option("--y", sa.y)->group(kRequired);
    sector->add_option("--N", sa.N)
        ->group(kRequired)
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{kMaxSieveLimit}));
    sector->add_option("--m", sa.m)->capture_default_str();
    sector->callback([&] { action = [&] { return cmd_sector(run, sa); }; });

    SeriesArgs sea;
    auto* series = app.add_subcommand("series", "partial sums F_{m,N}(s) over an s grid");
    series->add_option("--sigma", sea.sigma)->delimiter(',')->capture_default_str();
    series->add_option("--t", sea.t)->delimiter(',')->capture_default_str();
    series->add_option("--N", sea.N)
        ->group(kRequired)
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{kMaxSieveLimit}));
    series->add_option("--m", sea.levels, "levels, e.g. 1,10,inf")
        ->delimiter(',')
        ->capture_default_str();
    series->add_option("--q", sea.q, "compare every level against this one (gaps.csv)");
    series->add_option("--euler-primes", sea.euler_primes,
                       "also evaluate the Euler product to this prime");
    series->add_option("--kmax", sea.kmax)->capture_default_str();
    series->callback([&] { action = [&] { return cmd_series(run, sea); }; });

    GrowthArgs ga;
    auto* growth = app.add_subcommand("growth", "summatory checkpoints and log-log fit");
    growth->add_option("--N", ga.N)
        ->group(kRequired)
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{kMaxSieveLimit}));
    growth->add_option("--m", ga.levels)->delimiter(',')->capture_default_str();
    growth->add_option("--ratio", ga.ratio, "checkpoint ratio")->capture_default_str();
    growth->callback([&] { action = [&] { return cmd_growth(run, ga); }; });

    GridArgs gra;
    auto* grid = app.add_subcommand("grid", "J x K column diagnostic of ordered angles");
    grid->add_option("--N", gra.N)
        ->group(kRequired)
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{kMaxSieveLimit}));
    grid->add_option("--alpha", gra.alpha)->delimiter(',')->capture_default_str();
    grid->add_option("--m", gra.levels)->delimiter(',')->capture_default_str();
    grid->callback([&] { action = [&] { return cmd_grid(run, gra); }; });

    InjectArgs ia;
    auto* inject = app.add_subcommand("inject", "exact duplicate scan of (parity, r)");
    inject->add_option("--N", ia.N)
        ->group(kRequired)
        ->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1000000}));
    inject->callback([&] { action = [&] { return cmd_inject(run, ia); }; });

    CacheArgs cca;
    auto* cache = app.add_subcommand("cache", "manage the on-disk sieve cache");
    cache->add_option("action", cca.action, "build | verify | list | clear | path")
        ->required()
        ->check(CLI::IsMember({"build", "verify", "list", "clear", "path"}));
    cache->add_option("--limit", cca.limit)
        ->check(CLI::Range(std::uint64_t{2}, std::uint64_t{kMaxSieveLimit}));
    cache->callback([&] { action = [&] { return cmd_cache(run, cca); }; });

    for (auto* sub : app.get_subcommands({})) add_common(sub, run.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error_record("validation", e.what(), kExitValidation);
        return kExitValidation;
    }

    CLI::App* sub = app.get_subcommands().front();
    run.command = sub->get_name();
    try {
        merge_config(sub, run);
        return action();
    } catch (const IoError& e) {
        error_record("io", e.what(), kExitIo);
        return kExitIo;
    } catch (const StateError& e) {
        error_record("state", e.what(), kExitFinding);
        return kExitFinding;
    } catch (const std::invalid_argument& e) {  // DomainError, InsufficientDataError
        error_record("validation", e.what(), kExitValidation);
        return kExitValidation;
    } catch (const std::out_of_range& e) {
        error_record("validation", e.what(), kExitValidation);
        return kExitValidation;
    } catch (const std::length_error& e) {
        error_record("validation", e.what(), kExitValidation);
        return kExitValidation;
    } catch (const std::domain_error& e) {
        error_record("validation", e.what(), kExitValidation);
        return kExitValidation;
    } catch (const std::exception& e) {
        error_record("internal", e.what(), kExitFinding);
        return kExitFinding;
    }
}
