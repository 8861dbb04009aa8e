/**
 * @file oracle.hpp
 * @brief Exhaustive ground truth for tiny instances.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vnep/instance.hpp"

namespace vnep {

struct OracleBudget {
    std::size_t max_node_maps = 1'000'000;  ///< type-respecting node maps considered
    std::size_t max_path_hops = 4;          ///< longest substrate path per request edge
    std::size_t max_mappings = 2'000'000;   ///< enumerated mappings / search nodes
};

struct EnumeratedMapping {
    Mapping mapping;
    bool respects_capacities = false;
};

/// Simple substrate paths from @p from to @p to with at most @p max_hops
/// arcs, in lexicographic order (the empty path iff from == to).
std::vector<Path> simple_paths(const SubstrateGraph& substrate, const NodeId& from, const NodeId& to,
                               std::size_t max_hops);

/// Every valid mapping within the budget; throws BudgetExceeded otherwise.
/// Empty if some request node's type is supported by no substrate node.
std::vector<EnumeratedMapping> enumerate_valid_mappings(const Instance& instance, const OracleBudget& budget = {});

struct OracleResult {
    Mapping mapping;
    double cost = 0.0;
};

/// Cheapest capacity-respecting valid mapping (branch and bound over node
/// maps and edge paths); none if no such mapping exists.
std::optional<OracleResult> oracle_best(const Instance& instance, const OracleBudget& budget = {});

}  // namespace vnep
