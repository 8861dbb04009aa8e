/**
 * @file multiroot.hpp
 * @brief Generalized (multi-root) extraction orders: root regions, the root
 *        region order, cycle collapsing, induced rooted orders, multi-root
 *        confluence labels and the two-stage decomposition.
 */
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "vnep/decompose.hpp"

namespace vnep {

/// Checks that @p g is an acyclic orientation of exactly the request's
/// edges covering all request nodes (throws ValidationError).
void validate_generalized_order(const OrientedGraph& g, const RequestGraph& request);

/// Builds a generalized order from explicitly oriented request edges.
OrientedGraph make_generalized_order(const RequestGraph& request, const std::vector<Edge>& oriented);

/// Orients every edge from the endpoint closer to @p roots (multi-source BFS
/// distance) to the farther one; ties point from the smaller identifier.
OrientedGraph orient_from_roots(const RequestGraph& request, const std::vector<NodeId>& roots);

/// Unordered pair of region roots (first < second).
using RootPair = std::pair<NodeId, NodeId>;

RootPair root_pair(const NodeId& a, const NodeId& b);

struct RootRegions {
    OrientedGraph order;                            ///< the partitioned generalized order
    std::vector<NodeId> roots;                      ///< sorted
    std::map<NodeId, NodeId> owner;                 ///< node → region holding its out-edges
    std::map<NodeId, std::set<Edge>> edges;         ///< per root
    std::map<NodeId, std::set<NodeId>> nodes;       ///< per root
    std::map<NodeId, std::set<NodeId>> boundary;    ///< per root: nodes shared with other regions
    std::map<RootPair, std::set<NodeId>> pairwise;  ///< nonempty pairwise boundaries only
    std::map<RootPair, std::vector<NodeId>> chain;  ///< boundary chain order (ascending id)

    /// Region @p root as an oriented subgraph (its root included).
    OrientedGraph region_graph(const NodeId& root) const;
};

/// Multi-source BFS from the sources of @p g in lexicographic priority; a
/// node and all its out-edges join the first region reaching it. Rejects
/// edges joining two nodes of one pairwise boundary.
RootRegions partition_root_regions(const OrientedGraph& g);

struct RootRegionOrder {
    NodeId root;                                           ///< chosen top region
    OrientedGraph graph;                                   ///< nodes = region roots
    std::vector<NodeId> traversal;                         ///< BFS order from root
    std::map<NodeId, std::set<NodeId>> incoming_boundary;  ///< shared with predecessor regions
    bool tree_like = true;                                 ///< undirected graph is a tree
};

/// Orients region adjacency away from @p top by BFS (discovery order).
RootRegionOrder root_region_order(const RootRegions& regions, const NodeId& top);

/// An instance and generalized order together with their regions.
struct MultiRootSetup {
    Instance instance;
    OrientedGraph order;
    RootRegions regions;
    RootRegionOrder region_order;
    std::vector<NodeId> virtual_nodes;  ///< super-roots added while collapsing
};

/// Repeatedly merges the regions of an undirected cycle of the root region
/// order under a zero-demand super-root until the order is tree-like.
MultiRootSetup collapse_cycles(MultiRootSetup setup);

struct InducedOrder {
    ExtractionOrder order;  ///< rooted at the super-root
    Instance instance;      ///< request extended by the super-root and its edges
    NodeId super_root;
};

/// Adds a super-root (zero demand, a virtual type hosted on every substrate
/// node at zero cost) with an edge to every source of @p g.
InducedOrder induced_extraction_order(const Instance& instance, const OrientedGraph& g);

/// Per region: confluence labels of the region extended by a chain over each
/// pairwise boundary, restricted to the region's edges.
EdgeLabelAssignment multiroot_confluence_labels(const OrientedGraph& g, const RootRegions& regions);

/// Auto ordering per region (γ scope tag = region root).
std::vector<GammaScope> region_scopes(const RootRegions& regions, const EdgeLabelAssignment& labels);

/// Adapted program over @p g with one γ scope per region.
LpProgram build_multiroot(const Instance& instance, const OrientedGraph& g, const EdgeLabelAssignment& labels,
                          const std::vector<GammaScope>& scopes);

/// Stage 1: decompose every region on its own copy of @p solution. Stage 2:
/// stitch region mappings along @p region_order, matching boundary images.
ConvexCombination decompose_multiroot(const Instance& instance, const OrientedGraph& g, const RootRegions& regions,
                                      const RootRegionOrder& region_order, const EdgeLabelAssignment& labels,
                                      const std::vector<GammaScope>& scopes, const Assignment& solution,
                                      double epsilon = kDecompositionEpsilon);

/// Roots, per-region node/edge counts, boundaries, tree-like flag and
/// per-region widths under @p labels and @p scopes.
nlohmann::json region_report(const RootRegions& regions, const RootRegionOrder& region_order,
                             const EdgeLabelAssignment& labels, const std::vector<GammaScope>& scopes);

}  // namespace vnep
