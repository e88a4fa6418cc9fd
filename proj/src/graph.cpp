#include "gemsec/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "gemsec/rng.hpp"

namespace gemsec {

Graph Graph::from_edges(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges) {
    std::vector<std::size_t> degree(node_count, 0);
    for (const auto& [u, v] : edges) {
        if (u >= node_count || v >= node_count) throw InputError("edge endpoint out of range");
        if (u == v) continue;
        ++degree[u];
        ++degree[v];
    }
    Graph g;
    g.offsets_.assign(node_count + 1, 0);
    for (std::size_t i = 0; i < node_count; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
    g.targets_.resize(g.offsets_.back());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
        if (u == v) continue;
        g.targets_[cursor[u]++] = v;
        g.targets_[cursor[v]++] = u;
    }

    // sort and dedupe each row, then compact
    std::size_t write = 0;
    std::size_t row_begin = 0;
    for (std::size_t i = 0; i < node_count; ++i) {
        const std::size_t row_end = g.offsets_[i + 1];
        auto first = g.targets_.begin() + static_cast<std::ptrdiff_t>(row_begin);
        auto last = g.targets_.begin() + static_cast<std::ptrdiff_t>(row_end);
        std::sort(first, last);
        last = std::unique(first, last);
        const std::size_t new_begin = write;
        for (auto it = first; it != last; ++it) g.targets_[write++] = *it;
        g.offsets_[i] = new_begin;
        row_begin = row_end;
    }
    g.offsets_[node_count] = write;
    g.targets_.resize(write);
    return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const noexcept { return edge_slot(u, v) != npos; }

std::size_t Graph::edge_slot(NodeId u, NodeId v) const noexcept {
    const auto row = neighbors(u);
    const auto it = std::lower_bound(row.begin(), row.end(), v);
    if (it == row.end() || *it != v) return npos;
    return offsets_[u] + static_cast<std::size_t>(it - row.begin());
}

void Graph::check_node(NodeId v) const {
    if (v >= node_count()) {
        throw InputError("node id " + std::to_string(v) + " out of range (node_count=" +
                         std::to_string(node_count()) + ")");
    }
}

EdgeListFormat parse_edge_list_format(std::string_view name) {
    if (name == "csv") return EdgeListFormat::csv;
    if (name == "tsv") return EdgeListFormat::tsv;
    if (name == "whitespace" || name == "ws") return EdgeListFormat::whitespace;
    if (name == "auto") return EdgeListFormat::automatic;
    throw InputError("unknown edge list format '" + std::string(name) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
    const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
    while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_line(std::string_view line, EdgeListFormat format) {
    std::vector<std::string_view> out;
    if (format == EdgeListFormat::whitespace) {
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
            const std::size_t start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
            if (i > start) out.push_back(line.substr(start, i - start));
        }
        return out;
    }
    const char sep = format == EdgeListFormat::csv ? ',' : '\t';
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_int(std::string_view token, std::int64_t& value) {
    if (token.empty()) return false;
    if (token.front() == '+') token.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

EdgeListFormat detect_format(std::string_view line) {
    if (line.find(',') != std::string_view::npos) return EdgeListFormat::csv;
    if (line.find('\t') != std::string_view::npos) return EdgeListFormat::tsv;
    return EdgeListFormat::whitespace;
}

}  // namespace

LoadedGraph parse_edge_list(std::string_view text, EdgeListFormat format) {
    LoadedGraph out;
    std::unordered_map<std::int64_t, NodeId> dense;
    std::vector<std::pair<NodeId, NodeId>> edges;
    const auto intern = [&](std::int64_t label) {
        const auto [it, inserted] = dense.try_emplace(label, static_cast<NodeId>(out.original_ids.size()));
        if (inserted) out.original_ids.push_back(label);
        return it->second;
    };

    std::size_t line_no = 0;
    bool seen_data = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        if (format == EdgeListFormat::automatic) format = detect_format(line);
        const auto tokens = split_line(line, format);
        std::int64_t a = 0;
        std::int64_t b = 0;
        const bool ok = tokens.size() == 2 && parse_int(tokens[0], a) && parse_int(tokens[1], b);
        if (!ok) {
            const bool header = !seen_data && std::none_of(tokens.begin(), tokens.end(), [](auto t) {
                std::int64_t dummy = 0;
                return parse_int(t, dummy);
            });
            if (header) {
                out.header_skipped = true;
                seen_data = true;
                continue;
            }
            throw InputError("malformed edge list line " + std::to_string(line_no) + ": '" +
                             std::string(line) + "'");
        }
        seen_data = true;
        const NodeId u = intern(a);
        const NodeId v = intern(b);
        if (u == v) {
            ++out.self_loops_dropped;
            continue;
        }
        edges.emplace_back(std::min(u, v), std::max(u, v));
    }

    const std::size_t before = edges.size();
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    out.duplicates_merged = before - edges.size();
    if (out.original_ids.empty() || edges.empty()) throw InputError("edge list contains no edges");
    out.graph = Graph::from_edges(out.original_ids.size(), edges);
    return out;
}

LoadedGraph load_edge_list(const std::filesystem::path& path, EdgeListFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read edge list '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_edge_list(buffer.str(), format);
}

double jaccard_overlap(const Graph& g, NodeId u, NodeId v) {
    g.check_node(u);
    g.check_node(v);
    const auto a = g.neighbors(u);
    const auto b = g.neighbors(v);
    std::size_t common = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++common;
            ++i;
            ++j;
        }
    }
    const std::size_t uni = a.size() + b.size() - common;
    return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

double EdgeWeightTable::weight(NodeId u, NodeId v) const {
    if (graph_ == nullptr) throw InputError("edge weight table is empty");
    const std::size_t slot = graph_->edge_slot(u, v);
    if (slot == Graph::npos) {
        throw InputError("no edge weight for (" + std::to_string(u) + ", " + std::to_string(v) + ")");
    }
    return weights_[slot];
}

EdgeWeightTable compute_edge_weights(const Graph& g) {
    std::vector<double> weights(g.targets().size(), 0.0);
    const auto offsets = g.offsets();
    const auto targets = g.targets();
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (std::size_t s = offsets[u]; s < offsets[u + 1]; ++s) {
            const NodeId v = targets[s];
            if (v < u) continue;
            const double w = jaccard_overlap(g, u, v);
            weights[s] = w;
            weights[g.edge_slot(v, u)] = w;
        }
    }
    return EdgeWeightTable(g, std::move(weights));
}

Graph erdos_renyi(std::size_t n, double avg_degree, std::uint64_t seed) {
    if (n < 2) throw InputError("erdos_renyi: n must be at least 2");
    const double max_degree = static_cast<double>(n - 1);
    if (!(avg_degree > 0.0) || avg_degree > max_degree) {
        throw InputError("erdos_renyi: avg_degree must lie in (0, n-1]");
    }
    const double p = avg_degree / max_degree;
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(static_cast<std::size_t>(avg_degree * static_cast<double>(n) / 2.0 * 1.1) + 16);

    if (p >= 1.0) {
        for (NodeId v = 1; v < n; ++v)
            for (NodeId w = 0; w < v; ++w) edges.emplace_back(w, v);
        return Graph::from_edges(n, edges);
    }

    // Batagelj & Brandes skipping over the lower triangle.
    Rng rng = make_rng(seed, Stream::generator);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double log_q = std::log1p(-p);
    std::int64_t v = 1;
    std::int64_t w = -1;
    const auto nn = static_cast<std::int64_t>(n);
    while (v < nn) {
        const double r = uniform(rng);
        w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
        while (w >= v && v < nn) {
            w -= v;
            ++v;
        }
        if (v < nn) edges.emplace_back(static_cast<NodeId>(w), static_cast<NodeId>(v));
    }
    return Graph::from_edges(n, edges);
}

}  // namespace gemsec
