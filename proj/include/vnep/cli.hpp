/**
 * @file cli.hpp
 * @brief Command-line front end: argument parsing into a RunConfig and the
 *        subcommands validate, widths, solve, oracle and gen.
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vnep {

struct RunConfig {
    std::string command;                  ///< validate | widths | solve | oracle | gen
    std::string instance_path;            ///< --instance
    std::vector<std::string> roots;       ///< --root (repeatable)
    std::string order_path;               ///< --order: orientation document
    std::string ordering = "auto";        ///< --ordering {bag|auto}
    std::string formulation = "adapted";  ///< --formulation {mcf|adapted|multiroot}
    std::string export_lp_path;           ///< --export-lp
    std::string out_path;                 ///< --out
    std::string order_out_path;           ///< gen: --order-out
    std::optional<std::uint64_t> seed;    ///< --seed
    double tolerance = 1e-7;              ///< --tolerance (verification)
    // gen parameters
    std::string kind;                     ///< half-wheel | cactus | tree | two-half-wheels | hypergraph-eo | random
    std::optional<std::size_t> n;        ///< --n (half-wheel 9, two-half-wheels 7, tree 6)
    std::string wheel_root = "central";   ///< --wheel-root {central|outer}
    std::string sinks = "even";           ///< --sinks {even|odd}
    std::vector<std::size_t> omit_rim;    ///< --omit-rim K
    std::size_t max_nodes = 12;           ///< --max-nodes
    std::optional<std::size_t> substrate_nodes;  ///< --substrate-nodes (3; two-half-wheels 4)
    std::string sets;                     ///< --sets JSON array of arrays
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;    ///< solve did not produce a verified result
inline constexpr int kExitInput = 2;     ///< unreadable or invalid input / flags
inline constexpr int kExitInternal = 3;  ///< internal invariant breach or numerical failure

/// Parses arguments (returns kExitOk and fills @p config, or an exit code
/// after printing usage/errors to @p err).
int parse_arguments(int argc, const char* const* argv, RunConfig& config, std::ostream& out, std::ostream& err);

/// Executes @p config; errors become `{"error": {...}}` JSON on @p err.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_arguments followed by run.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vnep
