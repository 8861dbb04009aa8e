/**
 * @file fixtures.hpp
 * @brief Small hand-built instances shared by the test executables.
 */
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vnep/instance.hpp"
#include "vnep/lp.hpp"

namespace fixtures {

using nlohmann::json;

/// Builder for instance documents: every substrate node hosts type "t".
struct InstanceBuilder {
    json substrate_nodes = json::array();
    json substrate_edges = json::array();
    json request_nodes = json::array();
    json request_edges = json::array();
    json node_costs = json::object();
    json edge_costs = json::object();

    InstanceBuilder& host(const std::string& id, double capacity = 10.0, const std::string& type = "t") {
        substrate_nodes.push_back({{"id", id}, {"types", {type}}, {"capacity", {{type, capacity}}}});
        return *this;
    }
    InstanceBuilder& arc(const std::string& tail, const std::string& head, double capacity = 10.0) {
        substrate_edges.push_back({{"tail", tail}, {"head", head}, {"capacity", capacity}});
        return *this;
    }
    InstanceBuilder& both_ways(const std::string& a, const std::string& b, double capacity = 10.0) {
        return arc(a, b, capacity).arc(b, a, capacity);
    }
    InstanceBuilder& node(const std::string& id, double demand = 1.0, const std::string& type = "t") {
        request_nodes.push_back({{"id", id}, {"type", type}, {"demand", demand}});
        return *this;
    }
    InstanceBuilder& edge(const std::string& tail, const std::string& head, double demand = 1.0) {
        request_edges.push_back({{"tail", tail}, {"head", head}, {"demand", demand}});
        return *this;
    }
    InstanceBuilder& node_cost(const std::string& key, double c) {
        node_costs[key] = c;
        return *this;
    }
    InstanceBuilder& edge_cost(const std::string& key, double c) {
        edge_costs[key] = c;
        return *this;
    }
    json document() const {
        return {{"substrate", {{"nodes", substrate_nodes}, {"edges", substrate_edges}}},
                {"request", {{"nodes", request_nodes}, {"edges", request_edges}}},
                {"costs", {{"node", node_costs}, {"edge", edge_costs}}}};
    }
    vnep::Instance build() const { return vnep::load_instance(document()); }
};

/// Complete bidirected substrate on u, v, w.
inline InstanceBuilder triangle_substrate(double capacity = 10.0) {
    InstanceBuilder b;
    b.host("u", capacity).host("v", capacity).host("w", capacity);
    b.both_ways("u", "v", capacity).both_ways("u", "w", capacity).both_ways("v", "w", capacity);
    return b;
}

/// Single request edge (i, j) on the triangle substrate.
inline vnep::Instance single_edge_on_triangle() {
    auto b = triangle_substrate();
    b.node("i").node("j").edge("i", "j");
    return b.build();
}

/// Diamond request r→a, r→b, a→t, b→t on the triangle substrate.
inline InstanceBuilder diamond_on_triangle_builder() {
    auto b = triangle_substrate();
    b.node("r").node("a").node("b").node("t");
    b.edge("r", "a").edge("r", "b").edge("a", "t").edge("b", "t");
    return b;
}

inline vnep::Instance diamond_on_triangle() { return diamond_on_triangle_builder().build(); }

inline json diamond_on_triangle_document() { return diamond_on_triangle_builder().document(); }

/// Triangle request i→j, j→k, i→k on four substrate nodes where u and w
/// only have arcs towards v and x (plus return arcs for strong connectivity).
inline vnep::Instance non_decomposable_fixture() {
    InstanceBuilder b;
    b.host("u").host("v").host("w").host("x");
    b.arc("u", "v").arc("u", "x").arc("w", "v").arc("w", "x");
    b.arc("v", "u").arc("x", "w");
    b.node("i").node("j").node("k");
    b.edge("i", "j").edge("j", "k").edge("i", "k");
    return b.build();
}

/// Mapping of the single request edge (i, j).
inline vnep::Mapping single_edge_mapping(const std::string& tail, const std::string& head, vnep::Path path) {
    vnep::Mapping m;
    m.node_map = {{"i", tail}, {"j", head}};
    m.edge_map[{"i", "j"}] = std::move(path);
    return m;
}

/// Four single-edge mappings on the triangle with values 0.3/0.2/0.3/0.2; no
/// host of i in one mapping receives a path in another.
inline vnep::ConvexCombination four_single_edge_mappings() {
    vnep::ConvexCombination d;
    d.entries.push_back({0.3, single_edge_mapping("u", "u", {})});
    d.entries.push_back({0.2, single_edge_mapping("u", "v", {{"u", "v"}})});
    d.entries.push_back({0.3, single_edge_mapping("w", "w", {})});
    d.entries.push_back({0.2, single_edge_mapping("w", "v", {{"w", "v"}})});
    return d;
}

/// Half of the flow leaves u, half leaves w; j and k each split between v
/// and x so that following i→j and i→k from u ends in different images of k.
inline vnep::Assignment non_decomposable_assignment() {
    return {{"y[i@u]", 0.5},       {"y[i@w]", 0.5},       {"y[j@v]", 0.5},       {"y[j@x]", 0.5},
            {"y[k@v]", 0.5},       {"y[k@x]", 0.5},       {"z[i->j@u->v]", 0.5}, {"z[i->j@w->x]", 0.5},
            {"z[i->k@u->x]", 0.5}, {"z[i->k@w->v]", 0.5}};
}

/// Unit demands: sets every allocation variable to the plain sum of the
/// y- and z-values it covers.
inline void add_unit_allocations(const vnep::Instance& inst, vnep::Assignment& x) {
    for (const auto& u : inst.substrate.nodes) {
        double load = 0.0;
        for (const auto& i : inst.request.nodes) load += x["y[" + i + "@" + u + "]"];
        x["a[" + u + ".t]"] = load;
    }
    for (const auto& arc : inst.substrate.edges) {
        double load = 0.0;
        for (const auto& e : inst.request.edges)
            load += x["z[" + vnep::edge_name(e) + "@" + vnep::edge_name(arc) + "]"];
        x["a[" + vnep::edge_name(arc) + "]"] = load;
    }
}

}  // namespace fixtures
