/**
 * @file generators.hpp
 * @brief Deterministic instance generators (structured families and seeded
 *        random corpora) together with matching orientations.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "vnep/orderings.hpp"

namespace vnep {

/// Complete bidirected substrate `s1..sN` hosting one type everywhere.
struct SubstrateSpec {
    std::size_t nodes = 3;
    double node_capacity = 100.0;
    double edge_capacity = 100.0;
};

/// Request on type "t" with unit demands over @p spec's substrate.
Instance instance_on_complete_substrate(const std::set<NodeId>& nodes, const std::set<Edge>& edges,
                                        const SubstrateSpec& spec = {});

enum class HalfWheelRoot { Central, Outer };
enum class SinkParity { Even, Odd };

struct HalfWheelSpec {
    std::size_t n = 9;                       ///< rim nodes w1..wn around centre wc
    HalfWheelRoot root = HalfWheelRoot::Central;
    SinkParity sinks = SinkParity::Even;     ///< rim nodes receiving both rim edges (central root)
    std::set<std::size_t> missing_rim;       ///< k: omit the rim edge between wk and wk+1
    std::string prefix;                      ///< prepended to every node id
    SubstrateSpec substrate;
};

struct GeneratedOrder {
    Instance instance;
    ExtractionOrder order;
};

/// Central root: spokes leave wc, rim edges point into the sink nodes.
/// Outer root: the middle rim node is the root, rim edges point away from
/// it and spokes point into wc.
GeneratedOrder half_wheel(const HalfWheelSpec& spec);

/// Random cactus with at least one cycle, rooted (BFS orientation) at a
/// node of its first cycle.
GeneratedOrder random_cactus(std::uint64_t seed, std::size_t max_nodes, const SubstrateSpec& substrate = {});

/// Random tree oriented away from node `t0`.
GeneratedOrder random_tree(std::uint64_t seed, std::size_t nodes, const SubstrateSpec& substrate = {});

struct GeneratedMultiRoot {
    Instance instance;
    OrientedGraph order;  ///< generalized order
};

/// Two outer-rooted half-wheels (prefixes `l_` and `r_`) joined by the edge
/// from the last rim node of the left wheel to the first of the right one.
GeneratedMultiRoot two_half_wheels(std::size_t n, const SubstrateSpec& substrate = {.nodes = 4});

/// Request and order from hypergraph_extraction_order.
GeneratedOrder hypergraph_instance(const SetFamily& family, const SubstrateSpec& substrate = {});

/// Random connected request on `r0..r{n-1}`: a random spanning tree plus
/// each further node pair with probability @p extra_edge_probability.
RequestGraph random_request(std::uint64_t seed, std::size_t nodes, double extra_edge_probability);

struct RandomInstanceSpec {
    std::size_t max_request_nodes = 5;
    std::size_t max_substrate_nodes = 4;
    double extra_edge_probability = 0.3;
};

/// Random small instance: request as random_request with one or two types,
/// strongly connected substrate, random capacities and costs. The order is
/// the BFS orientation from `r0`.
GeneratedOrder random_instance(std::uint64_t seed, const RandomInstanceSpec& spec = {});

/// Generalized order document `{"roots": [...], "edges": [{tail, head, reversed}]}`.
nlohmann::json generalized_order_to_json(const OrientedGraph& g);
OrientedGraph generalized_order_from_json(const nlohmann::json& doc, const RequestGraph& request);

}  // namespace vnep
