#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gemsec/evaluation.hpp"
#include "gemsec/graph.hpp"
#include "gemsec/io.hpp"
#include "gemsec/kernels.hpp"
#include "gemsec/trainer.hpp"

namespace gemsec::cli {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double least_squares_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw InputError("slope needs at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(ys.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) throw InputError("slope needs at least two distinct x values");
    return sxy / sxx;
}

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_null()) return "";
    return v.dump();
}

// Flat key=value files go through CLI11's own reader. A JSON object is read
// as a run manifest and its "config" member supplies the values. Keys apply
// to the subcommand being run.
class ConfigReader : public CLI::ConfigBase {
public:
    explicit ConfigReader(const CLI::App& root) : root_(root) {}

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        std::vector<CLI::ConfigItem> items = read_items(in);
        const auto active = root_.get_subcommands();
        if (!active.empty()) {
            for (auto& item : items)
                if (item.parents.empty()) item.parents.push_back(active.front()->get_name());
        }
        return items;
    }

private:
    std::vector<CLI::ConfigItem> read_items(std::istream& in) const {
        const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first == std::string::npos || text[first] != '{') {
            std::istringstream s(text);
            return CLI::ConfigBase::from_config(s);
        }
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw CLI::ConfigError(std::string("manifest is not valid JSON: ") + e.what());
        }
        if (!j.contains("config") || !j["config"].is_object()) {
            throw CLI::ConfigError("manifest has no \"config\" object");
        }
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j["config"].items()) {
            CLI::ConfigItem item;
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar_text(v));
            } else {
                item.inputs.push_back(scalar_text(value));
            }
            items.push_back(std::move(item));
        }
        return items;
    }

    const CLI::App& root_;
};

json typed_value(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    const char* end = s.data() + s.size();
    std::int64_t i = 0;
    if (auto [p, ec] = std::from_chars(s.data(), end, i); ec == std::errc{} && p == end) return i;
    std::uint64_t u = 0;
    if (auto [p, ec] = std::from_chars(s.data(), end, u); ec == std::errc{} && p == end) return u;
    double d = 0.0;
    if (auto [p, ec] = std::from_chars(s.data(), end, d); ec == std::errc{} && p == end && std::isfinite(d)) {
        return d;
    }
    return s;
}

// Every option of `cmd` with the value that was used: given on the command
// line, read from --config, or defaulted.
json effective_config(const CLI::App& cmd) {
    json j = json::object();
    for (const CLI::Option* opt : cmd.get_options()) {
        const auto& names = opt->get_lnames();
        if (names.empty()) continue;
        const std::string& name = names.front();
        if (name == "help" || name == "config") continue;
        if (opt->get_expected_min() == 0) {
            j[name] = opt->count() > 0 && opt->as<bool>();
            continue;
        }
        const bool many = opt->get_expected_max() > 1;
        if (opt->count() > 0) {
            if (many) {
                json arr = json::array();
                for (const auto& r : opt->results()) arr.push_back(typed_value(r));
                j[name] = std::move(arr);
            } else {
                j[name] = typed_value(opt->results().back());
            }
        } else if (many) {
            j[name] = json::array();
        } else if (!opt->get_default_str().empty()) {
            j[name] = typed_value(opt->get_default_str());
        }
    }
    return j;
}

std::string hash_hex(std::uint64_t h) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << h;
    return s.str();
}

// Hash of the options that can change results.
std::string config_hash(json config) {
    for (const char* k : {"out", "workers", "dump-corpus", "output"}) config.erase(k);
    return hash_hex(fnv1a64(config.dump()));
}

fs::path resolve_output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(output_dir_env); env != nullptr && *env != '\0') return env;
    return default_output_dir;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

void select_kernel(const std::string& name) {
    try {
        if (name == "auto") {
            kernels::reset_backend();
        } else {
            kernels::set_backend(kernels::parse_backend(name));
        }
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

std::string kernel_in_use() { return std::string(kernels::backend_name(kernels::active().backend)); }

LoadedGraph load_graph(const std::string& path, const std::string& format, std::ostream& err) {
    LoadedGraph loaded = load_edge_list(path, parse_edge_list_format(format));
    if (loaded.self_loops_dropped > 0) err << "note: dropped " << loaded.self_loops_dropped << " self-loop(s)\n";
    if (loaded.duplicates_merged > 0) err << "note: merged " << loaded.duplicates_merged << " duplicate edge(s)\n";
    return loaded;
}

json sizes_json(const ClusterAssignment& a) {
    json arr = json::array();
    for (std::size_t s : a.sizes()) arr.push_back(s);
    return arr;
}

struct Stats {
    double mean = 0.0;
    double two_std = 0.0;
};

// Two sample standard deviations; zero for a single value.
Stats summarize(const std::vector<double>& xs) {
    Stats s;
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.two_std = 2.0 * std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

// ---- shared training options ----

struct ModelArgs {
    std::string order = "first";
    double p = 1.0;
    double q = 1.0;
    std::size_t dims = 16;
    std::size_t clusters = 20;
    std::size_t negatives = 10;
    std::size_t walks_per_node = 5;
    std::size_t walk_length = 80;
    std::size_t window = 5;
    double gamma0 = 0.1;
    double alpha0 = 0.01;
    double alpha_final = 0.001;
    double lambda = 0.0625;
    std::string noise = "unigram";
    bool exclude_source_noise = false;
    std::string horizon = "paper";
    std::string weight_scale = "pair";
    std::uint64_t seed = 42;
    std::size_t workers = 1;
    std::string kernel = "auto";
};

void add_model_options(CLI::App* cmd, ModelArgs& a) {
    cmd->add_option("--order", a.order, "random walk order")->check(CLI::IsMember({"first", "second"}));
    cmd->add_option("--p", a.p, "return parameter of second-order walks")->check(CLI::PositiveNumber);
    cmd->add_option("--q", a.q, "in-out parameter of second-order walks")->check(CLI::PositiveNumber);
    cmd->add_option("--dims", a.dims, "embedding dimension d");
    cmd->add_option("--clusters", a.clusters, "number of clusters |C|");
    cmd->add_option("--negatives", a.negatives, "noise samples per pair k");
    cmd->add_option("--walks-per-node", a.walks_per_node, "walks per source node N");
    cmd->add_option("--walk-length", a.walk_length, "nodes per walk l");
    cmd->add_option("--window", a.window, "context window size");
    cmd->add_option("--gamma0", a.gamma0, "initial clustering weight, in (0, 1]");
    cmd->add_option("--alpha0", a.alpha0, "initial learning rate");
    cmd->add_option("--alpha-final", a.alpha_final, "final learning rate");
    cmd->add_option("--lambda", a.lambda, "smoothness weight, used with --smooth");
    cmd->add_option("--noise", a.noise, "noise distribution")->check(CLI::IsMember({"unigram", "uniform"}));
    cmd->add_flag("--exclude-source-noise", a.exclude_source_noise, "redraw noise samples equal to the pair's source");
    cmd->add_option("--schedule-horizon", a.horizon,
                    "annealing horizon: paper (T = window*length*|V|*N) or reached (T = |V|*N)")
        ->check(CLI::IsMember({"paper", "reached"}));
    cmd->add_option("--weight-scale", a.weight_scale,
                    "pair: gamma and lambda are divided by the walk's pair count; walk: used as given")
        ->check(CLI::IsMember({"pair", "walk"}));
    cmd->add_option("--seed", a.seed, "random seed");
    cmd->add_option("--workers", a.workers, "walk producer threads (results do not depend on it)");
    cmd->add_option("--kernel", a.kernel, "vector kernel backend")
        ->check(CLI::IsMember({"auto", "scalar", "avx2", "neon"}));
}

TrainConfig to_train_config(const ModelArgs& a, bool clustering, bool smoothing) {
    TrainConfig cfg;
    cfg.dims = a.dims;
    cfg.clusters = a.clusters;
    cfg.negatives = a.negatives;
    cfg.gamma0 = a.gamma0;
    cfg.alpha0 = a.alpha0;
    cfg.alpha_final = a.alpha_final;
    cfg.lambda = a.lambda;
    cfg.clustering = clustering;
    cfg.smoothing = smoothing;
    cfg.noise = a.noise == "uniform" ? NoiseKind::uniform : NoiseKind::unigram;
    cfg.exclude_source_noise = a.exclude_source_noise;
    cfg.horizon = a.horizon == "reached" ? ScheduleHorizon::reached : ScheduleHorizon::paper;
    cfg.weight_scale = a.weight_scale == "walk" ? WeightScale::walk : WeightScale::pair;
    cfg.walk.walks_per_node = a.walks_per_node;
    cfg.walk.walk_length = a.walk_length;
    cfg.walk.window = a.window;
    cfg.walk.order = a.order == "second" ? WalkOrder::second : WalkOrder::first;
    cfg.walk.return_param = a.p;
    cfg.walk.inout_param = a.q;
    cfg.seed = a.seed;
    cfg.workers = a.workers;
    cfg.validate();
    return cfg;
}

std::string variant_name(const TrainConfig& cfg) {
    std::string name = cfg.smoothing ? "smooth-" : "";
    name += cfg.clustering ? "gemsec" : "deepwalk";
    if (cfg.walk.order == WalkOrder::second) name += "2";
    return name;
}

// ---- embed ----

struct EmbedArgs {
    ModelArgs model;
    std::string graph;
    std::string format = "auto";
    std::string mode = "gemsec";
    bool smooth = false;
    std::size_t kmeans_restarts = 1;
    std::string out;
    bool dump_corpus = false;
};

void setup_embed(CLI::App* cmd, EmbedArgs& a) {
    cmd->add_option("--graph", a.graph, "edge list file")->required();
    cmd->add_option("--format", a.format, "edge list format")
        ->check(CLI::IsMember({"auto", "csv", "tsv", "whitespace"}));
    cmd->add_option("--mode", a.mode, "gemsec learns clusters jointly; deepwalk sets the clustering weight to 0")
        ->check(CLI::IsMember({"gemsec", "deepwalk"}));
    cmd->add_flag("--smooth", a.smooth, "add the Jaccard-weighted smoothness term");
    add_model_options(cmd, a.model);
    cmd->add_option("--kmeans-restarts", a.kmeans_restarts, "k-means restarts used to cluster deepwalk embeddings")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", a.out, std::string("output directory (default $") + output_dir_env + " or " +
                                        default_output_dir + ")");
    cmd->add_flag("--dump-corpus", a.dump_corpus, "write every sampled walk to corpus.txt (dense ids)");
}

int cmd_embed(const CLI::App& cmd, const EmbedArgs& a, std::ostream& out, std::ostream& err) {
    select_kernel(a.model.kernel);
    const TrainConfig cfg = to_train_config(a.model, a.mode == "gemsec", a.smooth);
    const fs::path dir = resolve_output_dir(a.out);

    json timings = json::object();
    auto t0 = Clock::now();
    const LoadedGraph loaded = load_graph(a.graph, a.format, err);
    const Graph& g = loaded.graph;
    timings["load"] = seconds_since(t0);
    if (!cfg.clustering && g.node_count() < cfg.clusters) {
        throw InputError("graph has fewer nodes than --clusters");
    }

    ensure_dir(dir);
    const fs::path corpus_path = dir / "corpus.txt";
    std::ofstream corpus;
    TrainOptions options;
    if (a.dump_corpus) {
        corpus.open(corpus_path, std::ios::binary | std::ios::trunc);
        if (!corpus) throw InputError("cannot write '" + corpus_path.string() + "'");
        options.corpus = &corpus;
    }

    t0 = Clock::now();
    const TrainResult result = train(g, cfg, options);
    timings["train"] = seconds_since(t0);
    if (!result.state.all_finite()) throw std::runtime_error("training produced non-finite parameters");

    t0 = Clock::now();
    Matrix centers;
    std::string method;
    if (cfg.clustering) {
        centers = result.state.centers;
        method = "nearest_center";
    } else {
        KMeansOptions km;
        km.restarts = a.kmeans_restarts;
        km.seed = cfg.seed;
        centers = kmeans(result.state.embeddings, cfg.clusters, km).centers;
        method = "kmeans";
    }
    const ClusterAssignment assignment = assign_to_centers(result.state.embeddings, centers);
    const double q = modularity(g, assignment);
    timings["assign"] = seconds_since(t0);

    const json config = effective_config(cmd);
    const std::string hash = config_hash(config);

    t0 = Clock::now();
    json outputs = json::object();
    outputs["embeddings"] = (dir / "embeddings.csv").string();
    outputs["centers"] = (dir / "centers.csv").string();
    outputs["assignment"] = (dir / "assignment.csv").string();
    outputs["metrics"] = (dir / "metrics.json").string();
    outputs["manifest"] = (dir / "manifest.json").string();
    outputs["training_log"] = (dir / "training_log.csv").string();
    outputs["id_map"] = (dir / "id_map.json").string();
    if (a.dump_corpus) outputs["corpus"] = corpus_path.string();

    io::write_embeddings(dir / "embeddings.csv", result.state.embeddings, loaded.original_ids);
    io::write_centers(dir / "centers.csv", centers);
    io::write_assignment(dir / "assignment.csv", assignment, loaded.original_ids);
    io::write_training_log(dir / "training_log.csv", result.log);
    io::write_id_map(dir / "id_map.json", loaded.original_ids);

    json metrics = json::object();
    metrics["modularity"] = q;
    metrics["clusters"] = assignment.cluster_count;
    metrics["cluster_sizes"] = sizes_json(assignment);
    metrics["assignment"] = method;
    metrics["final_loss"] = result.log.empty() ? 0.0 : result.log.back().loss;
    metrics["seed"] = cfg.seed;
    metrics["config_hash"] = hash;
    io::write_text(dir / "metrics.json", metrics.dump(2) + "\n");
    timings["write"] = seconds_since(t0);

    json manifest = json::object();
    manifest["command"] = "embed";
    manifest["variant"] = variant_name(cfg);
    manifest["config"] = config;
    manifest["config_hash"] = hash;
    manifest["seed"] = cfg.seed;
    manifest["dataset"] = {{"path", fs::absolute(a.graph).lexically_normal().string()},
                           {"nodes", g.node_count()},
                           {"edges", g.edge_count()},
                           {"self_loops_dropped", loaded.self_loops_dropped},
                           {"duplicates_merged", loaded.duplicates_merged},
                           {"header_skipped", loaded.header_skipped}};
    manifest["effective"] = {{"clustering", cfg.clustering},
                             {"gamma_forced_zero", !cfg.clustering},
                             {"smoothing", cfg.smoothing},
                             {"lambda", cfg.effective_lambda()},
                             {"order", cfg.walk.order == WalkOrder::second ? "second" : "first"},
                             {"return_param", cfg.walk.return_param},
                             {"inout_param", cfg.walk.inout_param},
                             {"schedule_steps", total_steps(cfg, g.node_count())},
                             {"assignment", method},
                             {"kernel", kernel_in_use()}};
    manifest["timings"] = timings;
    manifest["outputs"] = outputs;
    io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");

    out << "modularity " << q << " (" << method << ", " << g.node_count() << " nodes, " << g.edge_count()
        << " edges) -> " << dir.string() << '\n';
    return 0;
}

// ---- evaluate ----

struct EvaluateArgs {
    std::string graph;
    std::string format = "auto";
    std::vector<std::string> embeddings;
    std::vector<std::string> centers;
    std::size_t clusters = 20;
    std::size_t repeats = 1;
    std::size_t restarts = 10;
    std::size_t max_iter = 300;
    std::uint64_t seed = 42;
    std::string kernel = "auto";
    std::string output;
};

void setup_evaluate(CLI::App* cmd, EvaluateArgs& a) {
    cmd->add_option("--graph", a.graph, "edge list the embeddings were trained on")->required();
    cmd->add_option("--format", a.format, "edge list format")
        ->check(CLI::IsMember({"auto", "csv", "tsv", "whitespace"}));
    cmd->add_option("--embeddings", a.embeddings, "embedding CSV; repeat to pool several runs")->required();
    cmd->add_option("--centers", a.centers, "centers CSV, one per --embeddings; enables nearest-center scoring");
    cmd->add_option("--clusters", a.clusters, "k for k-means when no centers are given")->check(CLI::PositiveNumber);
    cmd->add_option("--repeats", a.repeats, "k-means runs per embedding, seeds seed..seed+repeats-1")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--restarts", a.restarts, "k-means restarts per run; best WCSS kept")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", a.max_iter, "Lloyd iterations per restart")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", a.seed, "k-means seed");
    cmd->add_option("--kernel", a.kernel, "vector kernel backend")
        ->check(CLI::IsMember({"auto", "scalar", "avx2", "neon"}));
    cmd->add_option("--output", a.output, "also write the JSON report here");
}

Matrix read_centers(const std::string& path, std::size_t dims) {
    const io::LabelledMatrix rows = io::read_labelled_csv(path);
    if (rows.values.cols() != dims) {
        throw InputError(path + ": centers have dimension " + std::to_string(rows.values.cols()) +
                         ", embeddings have " + std::to_string(dims));
    }
    Matrix centers(rows.values.rows(), dims);
    std::vector<bool> seen(rows.values.rows(), false);
    for (std::size_t r = 0; r < rows.labels.size(); ++r) {
        const auto c = rows.labels[r];
        if (c < 0 || static_cast<std::size_t>(c) >= centers.rows() || seen[c]) {
            throw InputError(path + ": cluster ids must be 0..k-1, each once");
        }
        seen[c] = true;
        std::copy(rows.values.row(r).begin(), rows.values.row(r).end(), centers.row(c).begin());
    }
    return centers;
}

int cmd_evaluate(const CLI::App& cmd, const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    select_kernel(a.kernel);
    if (!a.centers.empty() && a.centers.size() != a.embeddings.size()) {
        throw InputError("give one --centers file per --embeddings file");
    }
    const LoadedGraph loaded = load_graph(a.graph, a.format, err);
    const Graph& g = loaded.graph;
    const bool nearest = !a.centers.empty();

    json runs = json::array();
    std::vector<double> primary, secondary;
    for (std::size_t f = 0; f < a.embeddings.size(); ++f) {
        const Matrix points = io::align_to_graph(io::read_labelled_csv(a.embeddings[f]), loaded.original_ids);
        if (nearest) {
            const Matrix centers = read_centers(a.centers[f], points.cols());
            const ClusterAssignment assignment = assign_to_centers(points, centers);
            const double q = modularity(g, assignment);
            KMeansOptions km{a.max_iter, a.restarts, a.seed};
            const double q_km = modularity(g, kmeans(points, centers.rows(), km).assignment);
            runs.push_back({{"embeddings", a.embeddings[f]},
                            {"centers", a.centers[f]},
                            {"modularity", q},
                            {"kmeans_modularity", q_km},
                            {"cluster_sizes", sizes_json(assignment)}});
            primary.push_back(q);
            secondary.push_back(q_km);
            continue;
        }
        for (std::size_t r = 0; r < a.repeats; ++r) {
            const std::uint64_t seed = a.seed + r;
            KMeansOptions best{a.max_iter, a.restarts, seed};
            KMeansOptions single{a.max_iter, 1, seed};
            const ClusterAssignment assignment = kmeans(points, a.clusters, best).assignment;
            const double q = modularity(g, assignment);
            const double q1 = modularity(g, kmeans(points, a.clusters, single).assignment);
            runs.push_back({{"embeddings", a.embeddings[f]},
                            {"seed", seed},
                            {"modularity", q},
                            {"modularity_single_restart", q1},
                            {"cluster_sizes", sizes_json(assignment)}});
            primary.push_back(q);
            secondary.push_back(q1);
        }
    }

    const Stats s = summarize(primary);
    const Stats s2 = summarize(secondary);
    json report = json::object();
    report["method"] = nearest ? "nearest_center" : "kmeans";
    report["graph"] = a.graph;
    report["count"] = primary.size();
    report["modularity"] = s.mean;
    report["mean"] = s.mean;
    report["two_std"] = s.two_std;
    if (nearest) {
        report["kmeans_mean"] = s2.mean;
        report["kmeans_two_std"] = s2.two_std;
    } else {
        report["clusters"] = a.clusters;
        report["restarts"] = a.restarts;
        report["mean_single_restart"] = s2.mean;
        report["two_std_single_restart"] = s2.two_std;
    }
    report["config"] = effective_config(cmd);
    report["runs"] = std::move(runs);
    const std::string text = report.dump(2) + "\n";
    if (!a.output.empty()) io::write_text(a.output, text);
    out << text;
    return 0;
}

// ---- benchmark ----

struct BenchmarkArgs {
    ModelArgs model;
    std::size_t min_log2 = 6;
    std::size_t max_log2 = 12;
    double avg_degree = 20.0;
    std::vector<std::string> modes{"deepwalk", "gemsec"};
    std::size_t repeats = 1;
    std::string out;
};

void setup_benchmark(CLI::App* cmd, BenchmarkArgs& a) {
    cmd->add_option("--min-log2", a.min_log2, "smallest graph has 2^min-log2 nodes");
    cmd->add_option("--max-log2", a.max_log2, "largest graph has 2^max-log2 nodes");
    cmd->add_option("--avg-degree", a.avg_degree, "expected degree of the random graphs")->check(CLI::PositiveNumber);
    cmd->add_option("--modes", a.modes, "comma-separated subset of deepwalk, gemsec, smooth-deepwalk, smooth-gemsec")
        ->delimiter(',')
        ->check(CLI::IsMember({"deepwalk", "gemsec", "smooth-deepwalk", "smooth-gemsec"}));
    cmd->add_option("--repeats", a.repeats, "timings per cell, modes taking turns; the minimum is reported")->check(CLI::PositiveNumber);
    add_model_options(cmd, a.model);
    cmd->add_option("--out", a.out, std::string("output directory (default $") + output_dir_env + " or " +
                                        default_output_dir + ")");
}

int cmd_benchmark(const CLI::App& cmd, const BenchmarkArgs& a, std::ostream& out, std::ostream&) {
    select_kernel(a.model.kernel);
    if (a.min_log2 < 1 || a.min_log2 > a.max_log2 || a.max_log2 > 30) {
        throw InputError("invalid size range 2^" + std::to_string(a.min_log2) + "..2^" + std::to_string(a.max_log2) +
                         " (need 1 <= min-log2 <= max-log2 <= 30)");
    }
    std::vector<std::string> modes;
    for (const auto& m : a.modes)
        if (std::find(modes.begin(), modes.end(), m) == modes.end()) modes.push_back(m);
    if (modes.empty()) throw InputError("no benchmark modes given");

    const fs::path dir = resolve_output_dir(a.out);
    ensure_dir(dir);

    std::map<std::string, std::vector<double>> seconds;  // per mode, per size
    std::ostringstream csv;
    csv << "log2_n,mode,seconds\n";
    json rows = json::array();
    std::vector<double> log2_sizes;
    for (std::size_t e = a.min_log2; e <= a.max_log2; ++e) {
        log2_sizes.push_back(static_cast<double>(e));
        const Graph g = erdos_renyi(std::size_t{1} << e, a.avg_degree, a.model.seed + e);
        // modes take turns within each repeat so slow drift of the machine
        // hits all of them alike
        std::vector<double> best(modes.size(), std::numeric_limits<double>::infinity());
        for (std::size_t r = 0; r < a.repeats; ++r)
            for (std::size_t m = 0; m < modes.size(); ++m) {
                const bool smooth = modes[m].starts_with("smooth-");
                const bool clustering = modes[m].ends_with("gemsec");
                best[m] = std::min(best[m], train(g, to_train_config(a.model, clustering, smooth)).seconds);
            }
        for (std::size_t m = 0; m < modes.size(); ++m) {
            seconds[modes[m]].push_back(best[m]);
            csv << e << ',' << modes[m] << ',' << best[m] << '\n';
            rows.push_back({{"log2_n", e}, {"mode", modes[m]}, {"seconds", best[m]}});
        }
    }

    json summary = json::object();
    summary["avg_degree"] = a.avg_degree;
    summary["repeats"] = a.repeats;
    summary["log2_n"] = log2_sizes;
    json slopes = json::object();
    for (const auto& mode : modes) {
        std::vector<double> ys;
        for (double s : seconds[mode]) ys.push_back(std::log2(std::max(s, 1e-12)));
        slopes[mode] = log2_sizes.size() >= 2 ? json(least_squares_slope(log2_sizes, ys)) : json(nullptr);
    }
    summary["slope"] = slopes;
    if (seconds.count("deepwalk") > 0) {
        json ratios = json::object();
        for (const auto& mode : modes) {
            if (mode == "deepwalk") continue;
            json r = json::array();
            for (std::size_t i = 0; i < log2_sizes.size(); ++i) r.push_back(seconds[mode][i] / seconds["deepwalk"][i]);
            ratios[mode] = std::move(r);
        }
        summary["ratio_to_deepwalk"] = std::move(ratios);
    }
    summary["kernel"] = kernel_in_use();
    summary["config"] = effective_config(cmd);
    summary["rows"] = std::move(rows);

    io::write_text(dir / "benchmark.csv", csv.str());
    io::write_text(dir / "benchmark.json", summary.dump(2) + "\n");
    out << summary.dump(2) << '\n';
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Joint node embedding and community detection", "gemsec"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.config_formatter(std::make_shared<ConfigReader>(app));
    app.set_config("--config", "", "key=value file or manifest.json from an earlier run");
    app.allow_config_extras(CLI::config_extras_mode::error);

    EmbedArgs embed;
    EvaluateArgs evaluate;
    BenchmarkArgs benchmark;
    CLI::App* embed_cmd = app.add_subcommand("embed", "train embeddings and clusters on an edge list");
    CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "modularity of saved embeddings");
    CLI::App* benchmark_cmd = app.add_subcommand("benchmark", "training time on random graphs of doubling size");
    for (CLI::App* cmd : {embed_cmd, evaluate_cmd, benchmark_cmd}) {
        cmd->option_defaults()->always_capture_default();
        cmd->fallthrough();  // --config after the subcommand name
    }
    setup_embed(embed_cmd, embed);
    setup_evaluate(evaluate_cmd, evaluate);
    setup_benchmark(benchmark_cmd, benchmark);
    for (CLI::App* cmd : {embed_cmd, evaluate_cmd, benchmark_cmd}) {
        for (CLI::Option* opt : cmd->get_options()) {
            if (opt->get_expected_max() <= 1) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        if (embed_cmd->parsed()) return cmd_embed(*embed_cmd, embed, out, err);
        if (evaluate_cmd->parsed()) return cmd_evaluate(*evaluate_cmd, evaluate, out, err);
        if (benchmark_cmd->parsed()) return cmd_benchmark(*benchmark_cmd, benchmark, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace gemsec::cli
