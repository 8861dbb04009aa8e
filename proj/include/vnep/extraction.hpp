/**
 * @file extraction.hpp
 * @brief Extraction orders (acyclic orientations of a request), confluence
 *        edge labels and decomposability checks for label assignments.
 */
#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vnep/instance.hpp"

namespace vnep {

/// Oriented copy of (part of) a request topology. Every oriented edge
/// remembers whether it points against the original request edge.
class OrientedGraph {
public:
    void add_node(const NodeId& i);
    /// Adds oriented edge (tail, head); @p reversed means the request edge is
    /// (head, tail).
    void add_edge(const NodeId& tail, const NodeId& head, bool reversed);

    const std::set<NodeId>& nodes() const { return nodes_; }
    /// Oriented edge → reversed flag, sorted by (tail, head).
    const std::map<Edge, bool>& edges() const { return edges_; }
    bool has_node(const NodeId& i) const { return nodes_.count(i) > 0; }
    bool has_edge(const Edge& e) const { return edges_.count(e) > 0; }
    bool is_reversed(const Edge& e) const { return edges_.at(e); }
    /// The request edge an oriented edge stands for.
    Edge original(const Edge& e) const;
    /// Out-/in-edges sorted by the opposite endpoint.
    const std::vector<Edge>& out_edges(const NodeId& i) const;
    const std::vector<Edge>& in_edges(const NodeId& i) const;
    /// Nodes without in-edges, sorted.
    std::vector<NodeId> sources() const;
    /// Kahn's algorithm with lexicographic tie-break; empty if cyclic.
    std::vector<NodeId> topological_order() const;
    bool is_acyclic() const;
    std::set<NodeId> reachable_from(const NodeId& i) const;
    /// Nodes that can reach @p i (including @p i).
    std::set<NodeId> ancestors_of(const NodeId& i) const;
    /// Subgraph spanned by the given oriented edges (plus their endpoints).
    OrientedGraph edge_subgraph(const std::set<Edge>& edges) const;

private:
    std::set<NodeId> nodes_;
    std::map<Edge, bool> edges_;
    std::map<NodeId, std::vector<Edge>> out_;
    std::map<NodeId, std::vector<Edge>> in_;
    static const std::vector<Edge> kNoEdges;
};

/// Rooted acyclic orientation: every node reachable from `root`.
struct ExtractionOrder : OrientedGraph {
    NodeId root;
};

using LabelSet = std::set<NodeId>;
/// Oriented edge → label set.
using EdgeLabelAssignment = std::map<Edge, LabelSet>;

std::string label_set_name(const LabelSet& s);  ///< "{a,b}"

/// Label set of any in-edge of @p i (∅ when @p i has no in-edges).
LabelSet incoming_labels(const OrientedGraph& g, const EdgeLabelAssignment& labels, const NodeId& i);

/// Throws ValidationError unless @p order is acyclic and rooted.
void validate_order(const ExtractionOrder& order);

/// Builds an order from explicitly oriented edges and checks that it
/// orients exactly the request's edges, is acyclic and rooted at @p root.
ExtractionOrder make_order(const RequestGraph& request, const NodeId& root, const std::vector<Edge>& oriented);

/// Orients each edge away from its first-discovered endpoint in a BFS from
/// @p root; edges inside one BFS layer point from the lexicographically
/// smaller endpoint.
ExtractionOrder orient_bfs(const RequestGraph& request, const NodeId& root);

/// e is labeled k iff e lies on a confluence ending in k. Works on any DAG.
EdgeLabelAssignment confluence_edge_labels(const OrientedGraph& g);

struct LabelReport {
    /// Properties: 1 extends confluence labels, 2 label-induced subgraphs
    /// connected and rooted, 3 subgraph of k contains k, 4 equal in-edge label
    /// sets, 5 no out-edge of k labeled k.
    std::array<bool, 5> property{true, true, true, true, true};
    bool path_continuity = true;
    std::vector<std::string> messages;

    bool passed() const;
};

LabelReport check_decomposable_labels(const OrientedGraph& g, const EdgeLabelAssignment& labels);

struct LabelSubgraph {
    std::set<NodeId> nodes;
    std::set<Edge> edges;
    std::optional<NodeId> root;
};

/// Edges labeled @p k with their endpoints; root is the unique source
/// reaching every node of the subgraph, if any. Throws if k is no label.
LabelSubgraph label_induced_subgraph(const OrientedGraph& g, const EdgeLabelAssignment& labels, const NodeId& k);

nlohmann::json order_to_json(const ExtractionOrder& order, const EdgeLabelAssignment* labels = nullptr);
/// Parses `{"root", "edges": [{"tail","head","reversed"}]}`; the edges are
/// oriented, "reversed" is recomputed from @p request and checked if given.
ExtractionOrder order_from_json(const nlohmann::json& doc, const RequestGraph& request);

}  // namespace vnep
