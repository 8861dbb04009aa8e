/**
 * @file orderings.hpp
 * @brief Set-family machinery (join trees, running intersection orderings),
 *        edge bags, extraction label set orderings and width parameters.
 */
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vnep/extraction.hpp"

namespace vnep {

struct SetFamily {
    std::vector<LabelSet> sets;

    /// Distinct sets in lexicographic order.
    SetFamily deduplicated() const;
    /// Inclusion-maximal distinct sets in lexicographic order.
    SetFamily maximal() const;
};

/// Tree over the sets of a family; `edges` index into `sets`.
struct JoinTree {
    std::vector<LabelSet> sets;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

/// Maximum spanning tree of the intersection graph, returned only if it
/// satisfies the join-tree property (every pairwise intersection is contained
/// in each set along the connecting tree path).
std::optional<JoinTree> join_tree(const SetFamily& family);

/// True if each set's overlap with the union of its predecessors lies inside
/// a single predecessor.
bool has_running_intersection_property(const std::vector<LabelSet>& ordering);

/// Preorder traversal of a join tree starting at @p start (or at the first
/// set); none iff the family is α-cyclic.
std::optional<std::vector<LabelSet>> running_intersection_ordering(const SetFamily& family,
                                                                   const std::optional<LabelSet>& start = {});

struct EdgeBag {
    std::vector<Edge> edges;
    LabelSet labels;
};

/// Finest partition of the out-edges of @p i such that edges with
/// overlapping labels share a bag. Bags are ordered by their first edge.
std::vector<EdgeBag> edge_bags(const OrientedGraph& g, const EdgeLabelAssignment& labels, const NodeId& i);

/// Label set sequence of one node together with derived indices.
/// Indices are 0-based; index 0 is the node's incoming label set.
struct NodeOrdering {
    std::vector<LabelSet> sets;
    std::map<Edge, std::size_t> representative;  ///< out-edge → first set containing its labels
    std::vector<LabelSet> predecessor_set;       ///< set ∩ union of earlier sets
    std::vector<std::size_t> predecessor_index;  ///< first earlier set holding predecessor_set (self if empty)
};

struct LabelSetOrdering {
    std::map<NodeId, NodeOrdering> nodes;

    const NodeOrdering& at(const NodeId& i) const;
};

/// Builds a NodeOrdering from explicit sets, deriving representatives and
/// predecessor data. Out-edges without a containing set get no entry.
NodeOrdering make_node_ordering(const OrientedGraph& g, const EdgeLabelAssignment& labels, const NodeId& i,
                                std::vector<LabelSet> sets);

/// Per node: incoming label set, then the bag label sets.
LabelSetOrdering bag_label_set_ordering(const OrientedGraph& g, const EdgeLabelAssignment& labels);

/// Per node: incoming label set followed by the inclusion-maximal out-edge
/// label sets in join-tree preorder; α-cyclic families are repaired by
/// merging the overlapping pair with the smallest union.
LabelSetOrdering auto_label_set_ordering(const OrientedGraph& g, const EdgeLabelAssignment& labels);

struct OrderingViolation {
    NodeId node;
    int property = 0;  ///< 1 running intersection, 2 first set, 3 representatives
    std::string message;
};

struct OrderingReport {
    std::vector<OrderingViolation> violations;  ///< first violation per node

    bool passed() const { return violations.empty(); }
};

OrderingReport validate_ordering(const OrientedGraph& g, const EdgeLabelAssignment& labels,
                                 const LabelSetOrdering& omega);

/// 1 + largest bag label set (1 without labels).
int extraction_width(const OrientedGraph& g, const EdgeLabelAssignment& labels);

/// 1 + largest label set of the ordering (1 without labels).
int extraction_label_width(const LabelSetOrdering& omega);

/// Order whose root out-edges carry exactly the given sets as confluence
/// labels: root → one node per set → its labels, plus root → label for
/// labels occurring in a single set.
ExtractionOrder hypergraph_extraction_order(const SetFamily& family);

struct UndirectedGraph {
    std::set<NodeId> nodes;
    std::set<Edge> edges;  ///< stored with first < second
};

/// Primal graph: nodes are labels, {a,b} adjacent iff a set contains both.
UndirectedGraph label_set_graph(const SetFamily& family);

}  // namespace vnep
