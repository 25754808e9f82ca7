#include "wlab/io.hpp"

#include <atomic>
#include <cstdio>
#include <sstream>

#include <unistd.h>

#include "json.hpp"

#include "wlab/errors.hpp"

namespace wlab::io {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::filesystem::path temp_sibling(const std::filesystem::path& target) {
    static std::atomic<unsigned> counter{0};
    auto name = "." + target.filename().string() + ".tmp." + std::to_string(::getpid()) + "." +
                std::to_string(counter++);
    return target.parent_path() / name;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

AtomicFile::AtomicFile(std::filesystem::path target, bool binary)
    : target_(std::move(target)), temp_(temp_sibling(target_)) {
    std::error_code ec;
    if (target_.has_parent_path()) std::filesystem::create_directories(target_.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + target_.parent_path().string());
    out_.open(temp_, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out_) throw IoError("cannot open " + temp_.string() + " for writing");
}

AtomicFile::~AtomicFile() {
    if (committed_) return;
    out_.close();
    std::error_code ec;
    std::filesystem::remove(temp_, ec);
}

void AtomicFile::commit() {
    out_.flush();
    const bool good = static_cast<bool>(out_);
    out_.close();
    std::error_code ec;
    if (!good) {
        std::filesystem::remove(temp_, ec);
        throw IoError("write failed for " + target_.string());
    }
    std::filesystem::rename(temp_, target_, ec);
    if (ec) {
        std::filesystem::remove(temp_, ec);
        throw IoError("cannot rename into " + target_.string());
    }
    committed_ = true;
}

void write_atomic(const std::filesystem::path& target, std::string_view content) {
    AtomicFile file(target);
    file.stream() << content;
    file.commit();
}

Config read_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read config " + file.string());
    Config config;
    std::string line;
    for (int number = 1; std::getline(in, line); ++number) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string key = eq == std::string::npos ? "" : trim(line.substr(0, eq));
        if (key.empty())
            throw DomainError(file.string() + ":" + std::to_string(number) +
                              ": expected key = value");
        if (!config.emplace(key, trim(line.substr(eq + 1))).second)
            throw DomainError(file.string() + ":" + std::to_string(number) + ": duplicate key " +
                              key);
    }
    return config;
}

std::string config_hash(const Config& config) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&](std::string_view s) {
        for (const unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& [k, v] : config) {
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string to_json(const RunManifest& manifest) {
    nlohmann::ordered_json j;
    j["command"] = manifest.command;
    j["status"] = manifest.status;
    j["config_hash"] = config_hash(manifest.config);
    j["config"] = manifest.config;
    // Stored as a string so no JSON reader can round it.
    j["G"] = format_double(manifest.G);
    j["sieve_limit"] = manifest.sieve_limit;
    j["threads"] = manifest.threads;
    j["wall_seconds"] = manifest.wall_seconds;
    j["outputs"] = manifest.outputs;
    return j.dump(2) + "\n";
}

std::string checkpoints_csv(const Level& level, const std::vector<Checkpoint>& rows) {
    std::ostringstream out;
    out << "m,N,reA,imA,absA\n";
    const std::string m = level.to_string();
    for (const auto& c : rows)
        out << m << ',' << c.N << ',' << format_double(c.A.real()) << ','
            << format_double(c.A.imag()) << ',' << format_double(c.abs_A) << '\n';
    return out.str();
}

std::string fits_csv(const std::vector<std::pair<Level, GrowthFit>>& rows) {
    std::ostringstream out;
    out << "m,alpha_hat,M_hat,r2,n_points\n";
    for (const auto& [level, fit] : rows)
        out << level.to_string() << ',' << format_double(fit.alpha_hat) << ','
            << format_double(fit.M_hat) << ',' << format_double(fit.fit_quality) << ','
            << fit.checkpoints.size() << '\n';
    return out.str();
}

std::string gaps_csv(const std::vector<GapRow>& rows) {
    std::ostringstream out;
    out << "sigma,t,N,m,q,measured,bound\n";
    for (const auto& r : rows)
        out << format_double(r.s.sigma) << ',' << format_double(r.s.t) << ',' << r.N << ','
            << r.m.to_string() << ',' << r.q.to_string() << ',' << format_double(r.gap.measured)
            << ',' << format_double(r.gap.bound) << '\n';
    return out.str();
}

std::string grid_csv(const std::vector<std::pair<Level, GridDiagnostic>>& rows) {
    std::ostringstream out;
    out << "m,N,alpha,J,K,R_N,max_column_magnitude,column_magnitude_sum,star_sum_magnitude,"
           "scaled_bound,chain_holds\n";
    for (const auto& [level, d] : rows)
        out << level.to_string() << ',' << d.N << ',' << format_double(d.alpha) << ',' << d.J
            << ',' << d.K << ',' << d.R_N << ',' << format_double(d.max_column_magnitude) << ','
            << format_double(d.column_magnitude_sum) << ',' << format_double(d.star_sum_magnitude)
            << ',' << format_double(d.scaled_bound) << ',' << (d.chain_holds ? 1 : 0) << '\n';
    return out.str();
}

}  // namespace wlab::io
