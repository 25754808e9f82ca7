#include <array>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <system_error>

#include "wlab/errors.hpp"
#include "wlab/io.hpp"
#include "wlab/prime_engine.hpp"

namespace wlab::sieve_cache {

namespace {

constexpr std::size_t kHeaderBytes = 5 + 1 + 8;

void put_le64(unsigned char* out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

std::uint64_t get_le64(const unsigned char* in) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
    return v;
}

}  // namespace

std::filesystem::path default_directory() {
    if (const char* env = std::getenv("WLAB_CACHE_DIR"); env && *env) return env;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg)
        return std::filesystem::path(xdg) / "wlab";
    if (const char* home = std::getenv("HOME"); home && *home)
        return std::filesystem::path(home) / ".cache" / "wlab";
    return std::filesystem::temp_directory_path() / "wlab";
}

std::filesystem::path path_for(const std::filesystem::path& dir, std::uint64_t limit) {
    return dir / ("spf-" + std::to_string(limit) + ".wlab");
}

void write(const SieveTable& table, const std::filesystem::path& file) {
    io::AtomicFile out(file, true);
    auto& os = out.stream();
    std::array<unsigned char, kHeaderBytes> header{};
    std::memcpy(header.data(), kMagic.data(), kMagic.size());
    header[5] = kVersion;
    put_le64(header.data() + 6, table.limit());
    os.write(reinterpret_cast<const char*>(header.data()), header.size());

    const auto entries = table.entries();
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(entries.data()),
                 static_cast<std::streamsize>(entries.size_bytes()));
    } else {
        for (const std::uint32_t e : entries) {
            const std::array<unsigned char, 4> b{
                static_cast<unsigned char>(e), static_cast<unsigned char>(e >> 8),
                static_cast<unsigned char>(e >> 16), static_cast<unsigned char>(e >> 24)};
            os.write(reinterpret_cast<const char*>(b.data()), 4);
        }
    }
    out.commit();
}

SieveTable read(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("sieve cache: cannot open " + file.string());
    std::array<unsigned char, kHeaderBytes> header{};
    in.read(reinterpret_cast<char*>(header.data()), header.size());
    if (!in || std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0)
        throw IoError("sieve cache: bad magic in " + file.string());
    if (header[5] != kVersion) throw IoError("sieve cache: unsupported version");
    const std::uint64_t limit = get_le64(header.data() + 6);
    if (limit < 2 || limit > kMaxSieveLimit) throw IoError("sieve cache: bad limit");

    std::error_code ec;
    const auto size = std::filesystem::file_size(file, ec);
    if (ec || size != kHeaderBytes + (limit + 1) * 4)
        throw IoError("sieve cache: truncated or oversized file " + file.string());

    std::vector<std::uint32_t> spf(static_cast<std::size_t>(limit + 1));
    in.read(reinterpret_cast<char*>(spf.data()), static_cast<std::streamsize>(spf.size() * 4));
    if (!in) throw IoError("sieve cache: short read from " + file.string());
    if constexpr (std::endian::native != std::endian::little) {
        for (auto& e : spf) e = __builtin_bswap32(e);
    }
    return SieveTable::from_entries(std::move(spf));
}

SieveTable load_or_build(std::uint64_t limit, const std::filesystem::path& dir) {
    const auto file = path_for(dir, limit);
    if (std::filesystem::exists(file)) {
        try {
            return read(file);
        } catch (const IoError&) {
            // corrupt entry: rebuild and overwrite below
        }
    }
    SieveTable table(limit);
    write(table, file);
    return table;
}

}  // namespace wlab::sieve_cache
