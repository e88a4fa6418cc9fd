#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "gemsec/io.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "gemsec");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = gemsec::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("gemsec_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

json read_json(const std::string& path) { return json::parse(gemsec::io::read_text(path)); }

const std::string karate = oracle::data_path("karate.csv").string();

// small but complete training settings
const std::vector<std::string> quick{"--walk-length", "20", "--walks-per-node", "2", "--dims", "8"};

std::vector<std::string> with(std::vector<std::string> args, const std::vector<std::string>& extra) {
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

}  // namespace

TEST_CASE("embed writes its outputs and exits 0") {
    TempDir dir;
    const auto r = run(with({"embed", "--graph", karate, "--mode", "gemsec", "--clusters", "2", "--seed", "1",
                             "--out", dir / "run"},
                            quick));
    CHECK(r.code == 0);
    for (const char* f : {"embeddings.csv", "centers.csv", "assignment.csv", "metrics.json", "manifest.json",
                          "training_log.csv", "id_map.json"})
        CHECK(fs::exists(dir.path / "run" / f));
    const json metrics = read_json(dir / "run/metrics.json");
    CHECK(metrics["seed"] == 1);
    CHECK(metrics["clusters"] == 2);
    CHECK(metrics["cluster_sizes"].size() == 2);
    CHECK(metrics.contains("modularity"));
    CHECK(metrics["config_hash"].get<std::string>().size() == 16);
    CHECK(r.out.find("modularity") != std::string::npos);

    const auto rows = gemsec::io::read_labelled_csv(dir / "run/embeddings.csv");
    CHECK(rows.values.rows() == 34);
    CHECK(rows.values.cols() == 8);
    const json manifest = read_json(dir / "run/manifest.json");
    CHECK(manifest["dataset"]["nodes"] == 34);
    CHECK(manifest["dataset"]["edges"] == 78);
    CHECK(manifest["effective"]["clustering"] == true);
    CHECK(manifest["config"]["walk-length"] == 20);
}

TEST_CASE("smooth deepwalk forces gamma to zero and keeps lambda") {
    TempDir dir;
    const auto r = run(with({"embed", "--graph", karate, "--mode", "deepwalk", "--smooth", "--out", dir / "sdw"}, quick));
    REQUIRE(r.code == 0);
    const json m = read_json(dir / "sdw/manifest.json");
    CHECK(m["effective"]["gamma_forced_zero"] == true);
    CHECK(m["effective"]["clustering"] == false);
    CHECK(m["effective"]["smoothing"] == true);
    CHECK(m["effective"]["lambda"] == 0.0625);
    CHECK(m["effective"]["assignment"] == "kmeans");
}

TEST_CASE("second-order controls are recorded") {
    TempDir dir;
    const auto r = run(with({"embed", "--graph", karate, "--order", "second", "--p", "4", "--q", "4", "--out",
                             dir / "so"},
                            quick));
    REQUIRE(r.code == 0);
    const json m = read_json(dir / "so/manifest.json");
    CHECK(m["effective"]["order"] == "second");
    CHECK(m["effective"]["return_param"] == 4.0);
    CHECK(m["effective"]["inout_param"] == 4.0);
    CHECK(m["config"]["p"] == 4.0);
}

TEST_CASE("defaults match the standard settings") {
    TempDir dir;
    const auto r = run({"embed", "--graph", karate, "--walks-per-node", "1", "--out", dir / "d"});
    REQUIRE(r.code == 0);
    const json c = read_json(dir / "d/manifest.json")["config"];
    CHECK(c["walk-length"] == 80);
    CHECK(c["window"] == 5);
    CHECK(c["dims"] == 16);
    CHECK(c["clusters"] == 20);
    CHECK(c["negatives"] == 10);
    CHECK(c["lambda"] == 0.0625);
    CHECK(c["gamma0"] == 0.1);
    CHECK(c["alpha0"] == 0.01);
    CHECK(c["alpha-final"] == 0.001);
}

TEST_CASE("evaluate reproduces the modularity of embed") {
    TempDir dir;
    for (const char* mode : {"gemsec", "deepwalk"}) {
        const std::string out = dir / mode;
        REQUIRE(run(with({"embed", "--graph", karate, "--mode", mode, "--clusters", "2", "--seed", "3", "--out", out},
                         quick))
                    .code == 0);
        const double q = read_json(out + "/metrics.json")["modularity"];
        const auto r = run({"evaluate", "--graph", karate, "--embeddings", out + "/embeddings.csv", "--centers",
                            out + "/centers.csv"});
        REQUIRE(r.code == 0);
        const json report = json::parse(r.out);
        CHECK(report["method"] == "nearest_center");
        CHECK(report["modularity"].get<double>() == q);
        CHECK(report["runs"][0].contains("kmeans_modularity"));
    }
}

TEST_CASE("evaluate with repeats reports mean and two standard deviations") {
    TempDir dir;
    std::vector<std::string> args{"evaluate", "--graph", karate, "--clusters", "2", "--repeats", "10", "--restarts",
                                  "3", "--output", dir / "report.json"};
    for (const char* seed : {"1", "2"}) {
        const std::string out = dir / (std::string("dw") + seed);
        REQUIRE(run(with({"embed", "--graph", karate, "--mode", "deepwalk", "--seed", seed, "--out", out}, quick))
                    .code == 0);
        args.push_back("--embeddings");
        args.push_back(out + "/embeddings.csv");
    }
    const auto r = run(args);
    REQUIRE(r.code == 0);
    const json report = read_json(dir / "report.json");
    CHECK(report["count"] == 20);
    CHECK(report["runs"].size() == 20);
    std::vector<double> qs;
    for (const auto& run : report["runs"]) qs.push_back(run["modularity"]);
    double mean = 0.0;
    for (double q : qs) mean += q;
    mean /= qs.size();
    double ss = 0.0;
    for (double q : qs) ss += (q - mean) * (q - mean);
    CHECK(report["mean"].get<double>() == doctest::Approx(mean).epsilon(1e-12));
    CHECK(report["two_std"].get<double>() == doctest::Approx(2.0 * std::sqrt(ss / (qs.size() - 1))).epsilon(1e-12));
    CHECK(report.contains("mean_single_restart"));
    CHECK(report.contains("two_std_single_restart"));
}

TEST_CASE("benchmark emits one row per size and mode with a slope") {
    TempDir dir;
    const auto r = run({"benchmark", "--min-log2", "6", "--max-log2", "9", "--modes", "gemsec", "--walk-length", "10",
                        "--walks-per-node", "1", "--dims", "4", "--out", dir / "b"});
    REQUIRE(r.code == 0);
    const json summary = read_json(dir / "b/benchmark.json");
    CHECK(summary["rows"].size() == 4);
    CHECK(summary["slope"].contains("gemsec"));
    CHECK(summary["log2_n"] == json::array({6, 7, 8, 9}));
    std::size_t lines = 0;
    for (char c : gemsec::io::read_text(dir / "b/benchmark.csv")) lines += c == '\n';
    CHECK(lines == 5);
}

TEST_CASE("user errors exit with code 1") {
    TempDir dir;
    CHECK(run({"benchmark", "--min-log2", "9", "--max-log2", "6", "--out", dir / "x"}).code == 1);
    CHECK(run({"benchmark", "--min-log2", "0", "--out", dir / "x"}).code == 1);
    CHECK(run({"benchmark", "--modes", "walklets", "--out", dir / "x"}).code == 1);
    gemsec::io::write_text(dir / "bad.csv", "0,1\n1,banana\n");
    const auto bad = run({"embed", "--graph", dir / "bad.csv", "--out", dir / "y"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("line 2") != std::string::npos);
    CHECK(run({"embed", "--graph", dir / "missing.csv", "--out", dir / "y"}).code == 1);
    CHECK(run({"embed", "--graph", karate, "--gamma0", "2", "--out", dir / "y"}).code == 1);
    CHECK(run({"embed", "--graph", karate, "--no-such-flag"}).code == 1);
    CHECK(run({"embed"}).code == 1);
    CHECK(run({"evaluate", "--graph", karate, "--embeddings", dir / "missing.csv"}).code == 1);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("config file values apply unless a flag overrides them") {
    TempDir dir;
    gemsec::io::write_text(dir / "run.cfg", "walk-length=12\nwindow=3\nwalks-per-node=1\ndims=4\nseed=9\n");
    REQUIRE(run({"embed", "--config", dir / "run.cfg", "--graph", karate, "--seed", "5", "--out", dir / "c"}).code == 0);
    const json c = read_json(dir / "c/manifest.json")["config"];
    CHECK(c["walk-length"] == 12);
    CHECK(c["window"] == 3);
    CHECK(c["dims"] == 4);
    CHECK(c["seed"] == 5);

    gemsec::io::write_text(dir / "typo.cfg", "walk-lenght=12\n");
    CHECK(run({"embed", "--config", dir / "typo.cfg", "--graph", karate, "--out", dir / "t"}).code == 1);
}

TEST_CASE("a manifest replays to identical outputs") {
    TempDir dir;
    REQUIRE(run(with({"embed", "--graph", karate, "--seed", "4", "--smooth", "--out", dir / "a"}, quick)).code == 0);
    REQUIRE(run({"embed", "--config", dir / "a/manifest.json", "--out", dir / "b"}).code == 0);
    for (const char* f : {"embeddings.csv", "assignment.csv", "metrics.json", "centers.csv"})
        CHECK(gemsec::io::read_text(dir / (std::string("a/") + f)) == gemsec::io::read_text(dir / (std::string("b/") + f)));
}

TEST_CASE("output directory comes from the environment when --out is absent") {
    TempDir dir;
    const std::string target = dir / "from_env";
    ::setenv(gemsec::cli::output_dir_env, target.c_str(), 1);
    const auto r = run(with({"embed", "--graph", karate}, quick));
    ::unsetenv(gemsec::cli::output_dir_env);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(fs::path(target) / "metrics.json"));
}

TEST_CASE("least squares slope and hash helpers") {
    const std::vector<double> xs{1, 2, 3, 4}, ys{3, 5, 7, 9};
    CHECK(gemsec::cli::least_squares_slope(xs, ys) == doctest::Approx(2.0));
    const std::vector<double> one{1};
    CHECK_THROWS(gemsec::cli::least_squares_slope(one, one));
    const std::vector<double> flat{2, 2};
    CHECK_THROWS(gemsec::cli::least_squares_slope(flat, flat));
    CHECK(gemsec::cli::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(gemsec::cli::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
