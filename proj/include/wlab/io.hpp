#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wlab/series_lab.hpp"

namespace wlab::io {

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

/// Writes to a sibling temp file and renames over the target on commit().
/// If the object dies uncommitted the temp file is removed and the target
/// is left untouched. Throws IoError.
class AtomicFile {
public:
    explicit AtomicFile(std::filesystem::path target, bool binary = false);
    ~AtomicFile();
    AtomicFile(const AtomicFile&) = delete;
    AtomicFile& operator=(const AtomicFile&) = delete;

    std::ofstream& stream() { return out_; }
    void commit();

private:
    std::filesystem::path target_;
    std::filesystem::path temp_;
    std::ofstream out_;
    bool committed_ = false;
};

void write_atomic(const std::filesystem::path& target, std::string_view content);

/// Flat "key = value" lines; '#' starts a comment. Throws IoError when the
/// file cannot be read, DomainError on a malformed line or repeated key.
using Config = std::map<std::string, std::string>;
Config read_config(const std::filesystem::path& file);

/// FNV-1a 64 over the sorted "key=value\n" lines, as 16 hex digits.
std::string config_hash(const Config& config);

struct RunManifest {
    std::string command;
    Config config;
    double G = 0.0;
    std::uint64_t sieve_limit = 0;
    double wall_seconds = 0.0;
    std::vector<std::string> outputs;
    std::string status = "ok";
    /// Execution settings that never change outputs; kept out of the hash.
    unsigned threads = 1;
};

/// Pretty-printed JSON; G is written with 17 significant digits.
std::string to_json(const RunManifest& manifest);

// CSV bodies for the fixed output schemas, header line included.
std::string checkpoints_csv(const Level& level, const std::vector<Checkpoint>& rows);
std::string fits_csv(const std::vector<std::pair<Level, GrowthFit>>& rows);

struct GapRow {
    SeriesPoint s;
    std::uint64_t N = 0;
    Level m = Level::lambda();
    Level q = Level::lambda();
    UniformityGap gap;
};
std::string gaps_csv(const std::vector<GapRow>& rows);

std::string grid_csv(const std::vector<std::pair<Level, GridDiagnostic>>& rows);

}  // namespace wlab::io
