/**
 * @file instance.hpp
 * @brief VNEP instances (substrate + request), mappings, allocations and
 *        convex combinations of mappings.
 */
#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace vnep {

using NodeId = std::string;
using TypeId = std::string;
/// Directed edge (tail, head).
using Edge = std::pair<NodeId, NodeId>;
/// Sequence of substrate edges forming a simple path (possibly empty).
using Path = std::vector<Edge>;

/// "tail->head"
std::string edge_name(const Edge& e);

/// Throws ValidationError unless @p id is a usable identifier: non-empty and
/// free of the characters that delimit canonical variable names.
void check_identifier(std::string_view id, std::string_view what);

struct SubstrateGraph {
    std::set<NodeId> nodes;
    std::set<Edge> edges;
    std::map<NodeId, std::set<TypeId>> supported_types;
    std::map<std::pair<NodeId, TypeId>, double> node_capacity;
    std::map<Edge, double> edge_capacity;

    std::set<TypeId> types() const;
    bool supports(const NodeId& u, const TypeId& type) const;
    /// Sorted nodes hosting @p type.
    std::vector<NodeId> nodes_supporting(const TypeId& type) const;
    std::vector<NodeId> successors(const NodeId& u) const;
    std::vector<NodeId> predecessors(const NodeId& u) const;
};

struct RequestGraph {
    std::set<NodeId> nodes;
    std::set<Edge> edges;
    std::map<NodeId, TypeId> node_type;
    std::map<NodeId, double> node_demand;
    std::map<Edge, double> edge_demand;

    /// Undirected neighbourhood, sorted.
    std::vector<NodeId> neighbors(const NodeId& i) const;
    bool is_connected() const;
    /// True if the undirected topology is a tree (connected, |E| = |V| - 1).
    bool is_tree() const;
};

/// A substrate resource: a (node, type) pair or a substrate edge.
struct Resource {
    enum class Kind { Node, Edge };
    Kind kind = Kind::Node;
    NodeId node;         ///< node, or tail for edges
    std::string detail;  ///< type, or head for edges

    static Resource of_node(NodeId u, TypeId type) { return {Kind::Node, std::move(u), std::move(type)}; }
    static Resource of_edge(const Edge& e) { return {Kind::Edge, e.first, e.second}; }
    Edge edge() const { return {node, detail}; }
    /// "u.type" or "u->v"
    std::string name() const;
    auto operator<=>(const Resource&) const = default;
};

struct Instance {
    SubstrateGraph substrate;
    RequestGraph request;
    /// Per-unit allocation cost; resources absent from the map cost 1.0.
    std::map<Resource, double> unit_cost;

    double cost(const Resource& r) const;
    double capacity(const Resource& r) const;
    /// Every substrate resource in deterministic order (node resources first).
    std::vector<Resource> resources() const;
};

/// Checks every structural invariant; throws ValidationError on the first
/// violation.
void validate_instance(const Instance& instance);

/// Parses the JSON instance schema and validates the result.
Instance load_instance(const nlohmann::json& document);
Instance load_instance_text(std::string_view text);
Instance load_instance_file(const std::string& path);
nlohmann::json instance_to_json(const Instance& instance);

struct Mapping {
    std::map<NodeId, NodeId> node_map;
    std::map<Edge, Path> edge_map;

    bool operator==(const Mapping&) const = default;
    auto operator<=>(const Mapping&) const = default;
};

struct MappingReport {
    bool valid = true;
    std::vector<std::string> violations;
};

MappingReport validate_mapping(const Instance& instance, const Mapping& m);

/// Resource allocations of a valid mapping (only nonzero entries).
/// Throws ValidationError if @p m is invalid.
std::map<Resource, double> allocations(const Instance& instance, const Mapping& m);

/// Objective value: Σ unit_cost · allocation.
double mapping_cost(const Instance& instance, const Mapping& m);

/// True if every allocation is within capacity (+ @p tolerance).
bool respects_capacities(const Instance& instance, const Mapping& m, double tolerance = 1e-9);

/// Restriction of @p m to the given nodes and edges.
Mapping project_mapping(const Mapping& m, const std::set<NodeId>& nodes, const std::set<Edge>& edges);

struct CombinationEntry {
    double value = 0.0;
    Mapping mapping;
};

struct ConvexCombination {
    std::vector<CombinationEntry> entries;

    double total() const;
};

nlohmann::json mapping_to_json(const Mapping& m);
Mapping mapping_from_json(const nlohmann::json& j);
nlohmann::json combination_to_json(const ConvexCombination& d);
ConvexCombination combination_from_json(const nlohmann::json& j);

}  // namespace vnep
