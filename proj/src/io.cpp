#include "gemsec/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace gemsec::io {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    return out;
}

void put_double(std::ostream& out, double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    out.write(buf, ptr - buf);
}

void write_header(std::ostream& out, const char* first, std::size_t dims) {
    out << first;
    for (std::size_t j = 0; j < dims; ++j) out << ",x_" << j;
    out << '\n';
}

void write_rows(std::ostream& out, const Matrix& m, auto label) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out << label(i);
        for (double x : m.row(i)) {
            out << ',';
            put_double(out, x);
        }
        out << '\n';
    }
}

}  // namespace

void write_embeddings(const std::filesystem::path& path, const Matrix& embeddings,
                      std::span<const std::int64_t> original_ids) {
    if (original_ids.size() != embeddings.rows()) throw InputError("id map does not match embedding rows");
    auto out = open_out(path);
    write_header(out, "id", embeddings.cols());
    write_rows(out, embeddings, [&](std::size_t i) { return original_ids[i]; });
}

void write_centers(const std::filesystem::path& path, const Matrix& centers) {
    auto out = open_out(path);
    write_header(out, "cluster", centers.cols());
    write_rows(out, centers, [](std::size_t i) { return i; });
}

void write_assignment(const std::filesystem::path& path, const ClusterAssignment& a,
                      std::span<const std::int64_t> original_ids) {
    if (original_ids.size() != a.labels.size()) throw InputError("id map does not match assignment");
    auto out = open_out(path);
    out << "id,cluster\n";
    for (std::size_t i = 0; i < a.labels.size(); ++i) out << original_ids[i] << ',' << a.labels[i] << '\n';
}

void write_training_log(const std::filesystem::path& path, std::span<const EpochLog> log) {
    auto out = open_out(path);
    out << "epoch,loss,gamma,alpha,seconds\n";
    for (const auto& e : log) {
        out << e.epoch << ',';
        put_double(out, e.loss);
        out << ',';
        put_double(out, e.gamma);
        out << ',';
        put_double(out, e.alpha);
        out << ',';
        put_double(out, e.seconds);
        out << '\n';
    }
}

void write_id_map(const std::filesystem::path& path, std::span<const std::int64_t> original_ids) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < original_ids.size(); ++i) j[std::to_string(original_ids[i])] = i;
    write_text(path, j.dump(2) + "\n");
}

LabelledMatrix read_labelled_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path.string() + "'");
    std::string line;
    std::size_t line_no = 0;
    std::size_t cols = 0;
    bool header = true;
    LabelledMatrix out;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        while (true) {
            const auto pos = rest.find(',');
            fields.push_back(rest.substr(0, pos));
            if (pos == std::string_view::npos) break;
            rest.remove_prefix(pos + 1);
        }
        if (header) {
            if (fields.size() < 2) throw InputError(path.string() + ": header needs a label and at least one value");
            cols = fields.size() - 1;
            header = false;
            continue;
        }
        if (fields.size() != cols + 1) {
            throw InputError(path.string() + ": line " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields, expected " + std::to_string(cols + 1));
        }
        std::int64_t label = 0;
        auto [p, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), label);
        if (ec != std::errc{} || p != fields[0].data() + fields[0].size()) {
            throw InputError(path.string() + ": bad label on line " + std::to_string(line_no));
        }
        out.labels.push_back(label);
        for (std::size_t j = 1; j < fields.size(); ++j) {
            double x = 0.0;
            auto [q, ec2] = std::from_chars(fields[j].data(), fields[j].data() + fields[j].size(), x);
            if (ec2 != std::errc{} || q != fields[j].data() + fields[j].size()) {
                throw InputError(path.string() + ": bad value on line " + std::to_string(line_no));
            }
            values.push_back(x);
        }
    }
    if (header) throw InputError(path.string() + ": empty file");
    out.values = Matrix(out.labels.size(), cols);
    std::copy(values.begin(), values.end(), out.values.values().begin());
    return out;
}

Matrix align_to_graph(const LabelledMatrix& rows, std::span<const std::int64_t> original_ids) {
    if (rows.labels.size() != original_ids.size()) {
        throw InputError("embedding file has " + std::to_string(rows.labels.size()) + " rows, graph has " +
                         std::to_string(original_ids.size()) + " nodes");
    }
    std::unordered_map<std::int64_t, std::size_t> dense;
    for (std::size_t i = 0; i < original_ids.size(); ++i) dense.emplace(original_ids[i], i);
    Matrix out(original_ids.size(), rows.values.cols());
    std::vector<bool> seen(original_ids.size(), false);
    for (std::size_t r = 0; r < rows.labels.size(); ++r) {
        const auto it = dense.find(rows.labels[r]);
        if (it == dense.end()) throw InputError("embedding id " + std::to_string(rows.labels[r]) + " is not in the graph");
        if (seen[it->second]) throw InputError("embedding id " + std::to_string(rows.labels[r]) + " appears twice");
        seen[it->second] = true;
        std::copy(rows.values.row(r).begin(), rows.values.row(r).end(), out.row(it->second).begin());
    }
    return out;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path.string() + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
}

}  // namespace gemsec::io
