#pragma once

// Command-line front end. Subcommands:
//
//   embed      load an edge list, train, assign clusters, write outputs
//   evaluate   score saved embeddings (nearest center or k-means)
//   benchmark  time training on Erdős–Rényi graphs of doubling size
//
// Every option can also be given in a --config file, either flat key=value
// lines or a manifest.json written by a previous run. Flags on the command
// line win over the file.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>

namespace gemsec::cli {

// Replaces the default output directory when --out is not given.
inline constexpr const char* output_dir_env = "GEMSEC_OUTPUT_DIR";
inline constexpr const char* default_output_dir = "gemsec_out";

// 0 on success, 1 on a user error (bad flags, unreadable or malformed input),
// 2 on an internal failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::uint64_t fnv1a64(std::string_view bytes);

// Ordinary least-squares slope of ys on xs.
double least_squares_slope(std::span<const double> xs, std::span<const double> ys);

}  // namespace gemsec::cli
