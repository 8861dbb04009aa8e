/**
 * @file generators.cpp
 * @brief Structured and random instance generators.
 */
#include "vnep/generators.hpp"

#include <algorithm>
#include <random>

#include "vnep/error.hpp"
#include "vnep/multiroot.hpp"

namespace vnep {

Instance instance_on_complete_substrate(const std::set<NodeId>& nodes, const std::set<Edge>& edges,
                                        const SubstrateSpec& spec) {
    if (spec.nodes == 0) throw ValidationError("substrate needs at least one node");
    Instance inst;
    for (std::size_t k = 1; k <= spec.nodes; ++k) {
        const NodeId u = "s" + std::to_string(k);
        inst.substrate.nodes.insert(u);
        inst.substrate.supported_types[u] = {"t"};
        inst.substrate.node_capacity[{u, "t"}] = spec.node_capacity;
    }
    for (const auto& u : inst.substrate.nodes)
        for (const auto& v : inst.substrate.nodes)
            if (u != v) {
                inst.substrate.edges.insert({u, v});
                inst.substrate.edge_capacity[{u, v}] = spec.edge_capacity;
            }
    for (const auto& i : nodes) {
        inst.request.nodes.insert(i);
        inst.request.node_type[i] = "t";
        inst.request.node_demand[i] = 1.0;
    }
    for (const auto& e : edges) {
        inst.request.edges.insert(e);
        inst.request.edge_demand[e] = 1.0;
    }
    validate_instance(inst);
    return inst;
}

GeneratedOrder half_wheel(const HalfWheelSpec& spec) {
    if (spec.n < 2) throw ValidationError("half wheel needs at least two rim nodes");
    auto rim = [&](std::size_t k) { return spec.prefix + "w" + std::to_string(k); };
    const NodeId centre = spec.prefix + "wc";
    std::set<NodeId> nodes{centre};
    for (std::size_t k = 1; k <= spec.n; ++k) nodes.insert(rim(k));
    std::vector<Edge> oriented;
    if (spec.root == HalfWheelRoot::Central) {
        const std::size_t parity = spec.sinks == SinkParity::Even ? 0 : 1;
        for (std::size_t k = 1; k <= spec.n; ++k) oriented.push_back({centre, rim(k)});
        for (std::size_t k = 1; k < spec.n; ++k) {
            if (spec.missing_rim.count(k)) continue;
            if (k % 2 == parity)
                oriented.push_back({rim(k + 1), rim(k)});
            else
                oriented.push_back({rim(k), rim(k + 1)});
        }
    } else {
        if (!spec.missing_rim.empty()) throw ValidationError("outer-rooted half wheels need the complete rim");
        const std::size_t mid = (spec.n + 1) / 2;
        for (std::size_t k = 1; k <= spec.n; ++k) oriented.push_back({rim(k), centre});
        for (std::size_t k = 1; k < spec.n; ++k) {
            if (k < mid)
                oriented.push_back({rim(k + 1), rim(k)});
            else
                oriented.push_back({rim(k), rim(k + 1)});
        }
    }
    std::set<Edge> edges(oriented.begin(), oriented.end());
    GeneratedOrder out{instance_on_complete_substrate(nodes, edges, spec.substrate), {}};
    const NodeId root = spec.root == HalfWheelRoot::Central ? centre : rim((spec.n + 1) / 2);
    out.order = make_order(out.instance.request, root, oriented);
    return out;
}

namespace {

std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

/// Multiple of @p step in [lo, hi].
double stepped(std::mt19937_64& rng, double lo, double hi, double step) {
    const auto steps = static_cast<std::size_t>((hi - lo) / step + 0.5);
    return lo + step * static_cast<double>(uniform_index(rng, 0, steps));
}

}  // namespace

GeneratedOrder random_cactus(std::uint64_t seed, std::size_t max_nodes, const SubstrateSpec& substrate) {
    if (max_nodes < 3) throw ValidationError("a cactus with a cycle needs at least three nodes");
    std::mt19937_64 rng(seed);
    auto id = [](std::size_t k) { return "c" + std::to_string(k); };
    std::size_t count = 0;
    std::set<Edge> edges;
    auto add_cycle = [&](std::size_t anchor, std::size_t length) {
        std::size_t prev = anchor;
        for (std::size_t k = 1; k < length; ++k) {
            const std::size_t next = count++;
            edges.insert({id(prev), id(next)});
            prev = next;
        }
        edges.insert({id(prev), id(anchor)});
    };
    count = 1;
    add_cycle(0, std::min<std::size_t>(uniform_index(rng, 3, 5), max_nodes));
    while (count < max_nodes) {
        if (coin(rng, 0.3)) break;
        const std::size_t anchor = uniform_index(rng, 0, count - 1);
        const std::size_t room = max_nodes - count;
        if (room >= 2 && coin(rng, 0.6)) {
            add_cycle(anchor, std::min<std::size_t>(uniform_index(rng, 3, 5), room + 1));
        } else {
            edges.insert({id(anchor), id(count)});
            ++count;
        }
    }
    std::set<NodeId> nodes;
    for (std::size_t k = 0; k < count; ++k) nodes.insert(id(k));
    GeneratedOrder out{instance_on_complete_substrate(nodes, edges, substrate), {}};
    out.order = orient_bfs(out.instance.request, id(0));
    return out;
}

GeneratedOrder random_tree(std::uint64_t seed, std::size_t nodes, const SubstrateSpec& substrate) {
    if (nodes == 0) throw ValidationError("a tree needs at least one node");
    std::mt19937_64 rng(seed);
    auto id = [](std::size_t k) { return "t" + std::to_string(k); };
    std::set<NodeId> ids{id(0)};
    std::set<Edge> edges;
    for (std::size_t k = 1; k < nodes; ++k) {
        ids.insert(id(k));
        const std::size_t parent = uniform_index(rng, 0, k - 1);
        edges.insert(coin(rng, 0.5) ? Edge{id(parent), id(k)} : Edge{id(k), id(parent)});
    }
    GeneratedOrder out{instance_on_complete_substrate(ids, edges, substrate), {}};
    out.order = orient_bfs(out.instance.request, id(0));
    return out;
}

GeneratedMultiRoot two_half_wheels(std::size_t n, const SubstrateSpec& substrate) {
    HalfWheelSpec left;
    left.n = n;
    left.root = HalfWheelRoot::Outer;
    left.prefix = "l_";
    left.substrate = substrate;
    HalfWheelSpec right = left;
    right.prefix = "r_";
    const auto a = half_wheel(left);
    const auto b = half_wheel(right);
    std::set<NodeId> nodes = a.instance.request.nodes;
    nodes.insert(b.instance.request.nodes.begin(), b.instance.request.nodes.end());
    std::set<Edge> edges = a.instance.request.edges;
    edges.insert(b.instance.request.edges.begin(), b.instance.request.edges.end());
    const Edge join{"l_w" + std::to_string(n), "r_w1"};
    edges.insert(join);
    GeneratedMultiRoot out{instance_on_complete_substrate(nodes, edges, substrate), {}};
    std::vector<Edge> oriented;
    for (const auto& [e, rev] : a.order.edges()) oriented.push_back(e);
    for (const auto& [e, rev] : b.order.edges()) oriented.push_back(e);
    oriented.push_back(join);
    out.order = make_generalized_order(out.instance.request, oriented);
    return out;
}

GeneratedOrder hypergraph_instance(const SetFamily& family, const SubstrateSpec& substrate) {
    ExtractionOrder order = hypergraph_extraction_order(family);
    std::set<Edge> edges;
    for (const auto& [e, rev] : order.edges()) edges.insert(e);
    GeneratedOrder out{instance_on_complete_substrate(order.nodes(), edges, substrate), {}};
    std::vector<Edge> oriented(edges.begin(), edges.end());
    out.order = make_order(out.instance.request, order.root, oriented);
    return out;
}

RequestGraph random_request(std::uint64_t seed, std::size_t nodes, double extra_edge_probability) {
    if (nodes == 0) throw ValidationError("a request needs at least one node");
    std::mt19937_64 rng(seed);
    auto id = [](std::size_t k) { return "r" + std::to_string(k); };
    RequestGraph req;
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 1; k < nodes; ++k) pairs.insert({uniform_index(rng, 0, k - 1), k});
    for (std::size_t a = 0; a < nodes; ++a)
        for (std::size_t b = a + 1; b < nodes; ++b)
            if (!pairs.count({a, b}) && coin(rng, extra_edge_probability)) pairs.insert({a, b});
    for (std::size_t k = 0; k < nodes; ++k) {
        req.nodes.insert(id(k));
        req.node_type[id(k)] = "t";
        req.node_demand[id(k)] = 1.0;
    }
    for (const auto& [a, b] : pairs) {
        const Edge e = coin(rng, 0.5) ? Edge{id(a), id(b)} : Edge{id(b), id(a)};
        req.edges.insert(e);
        req.edge_demand[e] = 1.0;
    }
    return req;
}

GeneratedOrder random_instance(std::uint64_t seed, const RandomInstanceSpec& spec) {
    std::mt19937_64 rng(seed);
    const std::size_t n_request = uniform_index(rng, 2, std::max<std::size_t>(2, spec.max_request_nodes));
    const std::size_t n_substrate = uniform_index(rng, 2, std::max<std::size_t>(2, spec.max_substrate_nodes));
    Instance inst;
    inst.request = random_request(rng(), n_request, spec.extra_edge_probability);
    const bool two_types = coin(rng, 0.4);
    for (const auto& i : inst.request.nodes) {
        inst.request.node_type[i] = two_types && coin(rng, 0.5) ? "t2" : "t1";
        inst.request.node_demand[i] = stepped(rng, 0.5, 2.0, 0.5);
    }
    for (const auto& e : inst.request.edges) inst.request.edge_demand[e] = stepped(rng, 0.5, 2.0, 0.5);

    std::vector<NodeId> subs;
    for (std::size_t k = 0; k < n_substrate; ++k) subs.push_back("s" + std::to_string(k));
    auto& sub = inst.substrate;
    sub.nodes.insert(subs.begin(), subs.end());
    for (std::size_t k = 0; k < n_substrate; ++k) sub.edges.insert({subs[k], subs[(k + 1) % n_substrate]});
    for (const auto& u : subs)
        for (const auto& v : subs)
            if (u != v && coin(rng, 0.4)) sub.edges.insert({u, v});
    std::set<TypeId> needed;
    for (const auto& [i, t] : inst.request.node_type) needed.insert(t);
    for (const auto& u : subs)
        for (const auto& t : needed)
            if (coin(rng, 0.75)) sub.supported_types[u].insert(t);
    for (const auto& t : needed) {
        const bool hosted = std::any_of(subs.begin(), subs.end(), [&](const NodeId& u) { return sub.supports(u, t); });
        if (!hosted) sub.supported_types[subs[uniform_index(rng, 0, n_substrate - 1)]].insert(t);
    }
    for (const auto& u : subs) {
        sub.supported_types[u];
        for (const auto& t : sub.supported_types[u]) {
            sub.node_capacity[{u, t}] = stepped(rng, 1.0, 5.0, 0.5);
            inst.unit_cost[Resource::of_node(u, t)] = stepped(rng, 0.5, 3.0, 0.25);
        }
    }
    for (const auto& e : sub.edges) {
        sub.edge_capacity[e] = stepped(rng, 1.0, 5.0, 0.5);
        inst.unit_cost[Resource::of_edge(e)] = stepped(rng, 0.5, 3.0, 0.25);
    }
    validate_instance(inst);
    GeneratedOrder out{inst, {}};
    out.order = orient_bfs(out.instance.request, "r0");
    return out;
}

nlohmann::json generalized_order_to_json(const OrientedGraph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [e, reversed] : g.edges())
        edges.push_back({{"tail", e.first}, {"head", e.second}, {"reversed", reversed}});
    return {{"roots", g.sources()}, {"edges", edges}};
}

OrientedGraph generalized_order_from_json(const nlohmann::json& doc, const RequestGraph& request) {
    if (!doc.is_object() || !doc.contains("edges") || !doc.at("edges").is_array())
        throw ParseError("generalized order must be an object with \"edges\"");
    std::vector<Edge> oriented;
    for (const auto& item : doc.at("edges")) {
        if (!item.contains("tail") || !item.contains("head"))
            throw ParseError("generalized order edge needs \"tail\" and \"head\"");
        oriented.push_back({item.at("tail").get<std::string>(), item.at("head").get<std::string>()});
    }
    OrientedGraph g = make_generalized_order(request, oriented);
    if (doc.contains("roots")) {
        std::vector<NodeId> roots = doc.at("roots").get<std::vector<NodeId>>();
        std::sort(roots.begin(), roots.end());
        if (roots != g.sources()) throw ValidationError("listed roots differ from the sources of the orientation");
    }
    return g;
}

}  // namespace vnep
