/**
 * @file decompose.hpp
 * @brief Decomposition of fractional LP solutions into convex combinations
 *        of valid mappings, plus verification of such combinations.
 */
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vnep/lp.hpp"

namespace vnep {

inline constexpr double kDecompositionEpsilon = 1e-9;

/// Flow of one request edge inside one (sub)formulation.
struct FlowView {
    std::function<double(const Edge& arc)> flow;         ///< z-value of a substrate arc
    std::function<double(const NodeId& u)> far_endpoint;  ///< y-value of the searched endpoint at u
};

struct ExtractedPath {
    Path path;   ///< in substrate arc direction
    NodeId end;  ///< substrate node carrying the far endpoint
};

/// Graph search from @p start over arcs with flow > ε. Forward searches
/// follow arcs and stop at the first node whose far-endpoint value is > ε;
/// reversed searches walk arcs backwards (the known endpoint is the head of
/// the request edge). Cycles of flow are skipped by the visited set.
/// Throws InvariantError when no admissible path exists.
ExtractedPath extract_path(const SubstrateGraph& substrate, const FlowView& view, const NodeId& start, bool reversed,
                           double epsilon = kDecompositionEpsilon);

struct DecomposeOptions {
    double epsilon = kDecompositionEpsilon;
    std::string scope;  ///< γ-variable scope tag (root regions); empty for rooted orders
};

/// Decomposes a build_mcf solution of a tree request along @p order.
ConvexCombination decompose_mcf_tree(const Instance& instance, const ExtractionOrder& order,
                                     const Assignment& solution, const DecomposeOptions& options = {});

/// Decomposes a build_adapted(_scoped) solution over the rooted (sub)graph
/// @p graph. Mappings cover exactly the nodes and edges of @p graph.
ConvexCombination decompose_rip(const Instance& instance, const OrientedGraph& graph, const NodeId& root,
                                const EdgeLabelAssignment& labels, const LabelSetOrdering& omega,
                                const Assignment& solution, const DecomposeOptions& options = {});

ConvexCombination decompose_rip(const Instance& instance, const ExtractionOrder& order,
                                const EdgeLabelAssignment& labels, const LabelSetOrdering& omega,
                                const Assignment& solution, const DecomposeOptions& options = {});

/// Result of following MCF flows edge by edge without any consistency
/// mechanism.
struct NaiveTrace {
    Mapping mapping;                     ///< first image found for every node
    std::vector<std::string> conflicts;  ///< nodes reached at two different substrate nodes
    bool consistent() const { return conflicts.empty(); }
};

/// Maps the root to its largest y-value and then each edge of @p order by
/// extract_path on the MCF variables, recording conflicting images.
NaiveTrace trace_naive(const Instance& instance, const ExtractionOrder& order, const Assignment& solution,
                       double epsilon = kDecompositionEpsilon);

struct VerificationReport {
    std::vector<std::string> failures;
    bool passed() const { return failures.empty(); }
};

/// Values sum to 1, every mapping valid and, if @p solution is given, the
/// allocations per resource stay within the allocation variables.
VerificationReport verify_convex_combination(const Instance& instance, const ConvexCombination& d,
                                             const Assignment* solution = nullptr, double tolerance = 1e-7);

/// Entry of minimal mapping cost (first on ties); none for an empty combination.
std::optional<CombinationEntry> best_entry(const Instance& instance, const ConvexCombination& d);

}  // namespace vnep
