#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "wlab/errors.hpp"
#include "wlab/io.hpp"

using namespace wlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("wlab-io-" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("format_double round-trips") {
    CHECK(io::format_double(0.1) == "0.10000000000000001");
    CHECK(io::format_double(1.0) == "1");
    CHECK(io::format_double(-530.0) == "-530");
    for (double v : {3.141592653589793, 1e-300, 0.4522474200410655, -2.5e17})
        CHECK(std::stod(io::format_double(v)) == v);
}

TEST_CASE("atomic writes leave nothing behind unless committed") {
    TempDir dir;
    const auto target = dir.path / "sub" / "out.csv";
    {
        io::AtomicFile f(target);
        f.stream() << "partial";
    }
    CHECK_FALSE(fs::exists(target));
    CHECK(fs::is_empty(dir.path / "sub"));

    io::write_atomic(target, "a,b\n1,2\n");
    CHECK(slurp(target) == "a,b\n1,2\n");
    io::write_atomic(target, "replaced\n");
    CHECK(slurp(target) == "replaced\n");
    CHECK(std::distance(fs::directory_iterator(dir.path / "sub"), fs::directory_iterator{}) == 1);

    CHECK_THROWS_AS(io::write_atomic("/proc/wlab-not-writable/x.csv", "x"), IoError);
}

TEST_CASE("config files") {
    TempDir dir;
    const auto file = dir.path / "run.cfg";
    io::write_atomic(file, "# growth run\nN = 1000\n  m=inf   # lambda\n\nout=data/growth\n");
    const auto cfg = io::read_config(file);
    CHECK(cfg.size() == 3);
    CHECK(cfg.at("N") == "1000");
    CHECK(cfg.at("m") == "inf");
    CHECK(cfg.at("out") == "data/growth");

    io::Config same{{"out", "data/growth"}, {"m", "inf"}, {"N", "1000"}};
    CHECK(io::config_hash(cfg) == io::config_hash(same));
    same["N"] = "1001";
    CHECK(io::config_hash(cfg) != io::config_hash(same));
    CHECK(io::config_hash({}).size() == 16);

    io::write_atomic(file, "N = 1\nN = 2\n");
    CHECK_THROWS_AS(io::read_config(file), DomainError);
    io::write_atomic(file, "just words\n");
    CHECK_THROWS_AS(io::read_config(file), DomainError);
    CHECK_THROWS_AS(io::read_config(dir.path / "missing.cfg"), IoError);
}

TEST_CASE("manifest json") {
    io::RunManifest m;
    m.command = "growth";
    m.config = {{"N", "100"}};
    m.G = 0.4522474200410655;
    m.sieve_limit = 100;
    m.outputs = {"a.csv", "b.csv"};
    const auto j = nlohmann::json::parse(io::to_json(m));
    CHECK(j["command"] == "growth");
    CHECK(j["config_hash"] == io::config_hash(m.config));
    CHECK(std::stod(j["G"].get<std::string>()) == m.G);
    CHECK(j["outputs"].size() == 2);
    CHECK(j["sieve_limit"] == 100);
}

TEST_CASE("csv schemas") {
    std::vector<Checkpoint> rows{{1, {1.0, 0.0}, 1.0},
                                 {2, {0.5, -0.25}, std::abs(std::complex<double>(0.5, -0.25))}};
    const auto cp = io::checkpoints_csv(Level::finite(3), rows);
    CHECK(cp.rfind("m,N,reA,imA,absA\n3,1,1,0,1\n3,2,0.5,-0.25,", 0) == 0);

    GrowthFit fit;
    fit.alpha_hat = 0.5;
    fit.M_hat = 2.0;
    fit.fit_quality = 0.25;
    fit.checkpoints.resize(9);
    CHECK(io::fits_csv({{Level::lambda(), fit}}) ==
          "m,alpha_hat,M_hat,r2,n_points\ninf,0.5,2,0.25,9\n");

    GridDiagnostic d;
    d.N = 12;
    d.alpha = 0.6;
    d.J = 4;
    d.K = 3;
    d.chain_holds = true;
    CHECK(io::grid_csv({{Level::finite(1), d}}).find("\n1,12,0.59999999999999998,4,3,0,0,0,0,0,1\n") !=
          std::string::npos);

    io::GapRow g{{2.0, 0.5}, 10, Level::finite(1), Level::lambda(), {0.125, 1.5, true}};
    CHECK(io::gaps_csv({g}) == "sigma,t,N,m,q,measured,bound\n2,0.5,10,1,inf,0.125,1.5\n");
}
