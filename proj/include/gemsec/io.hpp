#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gemsec/evaluation.hpp"
#include "gemsec/matrix.hpp"
#include "gemsec/trainer.hpp"

namespace gemsec::io {

// Values are written with 17 significant digits, so reading a file back
// reproduces the doubles exactly.

// id,x_0,...,x_{d-1}; one row per dense node, labelled with its original id.
void write_embeddings(const std::filesystem::path& path, const Matrix& embeddings,
                      std::span<const std::int64_t> original_ids);
// cluster,x_0,...,x_{d-1}
void write_centers(const std::filesystem::path& path, const Matrix& centers);
// id,cluster
void write_assignment(const std::filesystem::path& path, const ClusterAssignment& a,
                      std::span<const std::int64_t> original_ids);
// epoch,loss,gamma,alpha,seconds
void write_training_log(const std::filesystem::path& path, std::span<const EpochLog> log);
// {"<original id>": dense id, ...}
void write_id_map(const std::filesystem::path& path, std::span<const std::int64_t> original_ids);

struct LabelledMatrix {
    std::vector<std::int64_t> labels;  // first column
    Matrix values;
};

// Reads a CSV with a header row whose first column is an integer label.
LabelledMatrix read_labelled_csv(const std::filesystem::path& path);

// Reorders embedding rows from original-id labels into dense graph order.
// Throws InputError if the ids do not match the graph exactly.
Matrix align_to_graph(const LabelledMatrix& rows, std::span<const std::int64_t> original_ids);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace gemsec::io
