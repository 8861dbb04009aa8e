/**
 * @file multiroot.cpp
 * @brief Root regions, region orders, cycle collapsing, induced orders,
 *        multi-root labels and stitched decomposition.
 */
#include "vnep/multiroot.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "vnep/error.hpp"

namespace vnep {

void validate_generalized_order(const OrientedGraph& g, const RequestGraph& request) {
    if (g.nodes() != request.nodes) throw ValidationError("generalized order does not cover the request nodes");
    std::set<Edge> covered;
    for (const auto& [e, reversed] : g.edges()) {
        const Edge orig = g.original(e);
        if (!request.edges.count(orig)) throw ValidationError("oriented edge " + edge_name(e) + " is not a request edge");
        if (!covered.insert(orig).second) throw ValidationError("request edge " + edge_name(orig) + " oriented twice");
    }
    if (covered.size() != request.edges.size())
        throw ValidationError("generalized order does not cover every request edge");
    if (!g.is_acyclic()) throw ValidationError("generalized order contains a directed cycle");
}

OrientedGraph make_generalized_order(const RequestGraph& request, const std::vector<Edge>& oriented) {
    OrientedGraph g;
    for (const auto& i : request.nodes) g.add_node(i);
    for (const auto& e : oriented) {
        const bool forward = request.edges.count(e) > 0;
        if (!forward && !request.edges.count({e.second, e.first}))
            throw ValidationError("oriented edge " + edge_name(e) + " is not a request edge");
        if (g.has_edge(e) || g.has_edge({e.second, e.first}))
            throw ValidationError("request edge " + edge_name(e) + " oriented twice");
        g.add_edge(e.first, e.second, !forward);
    }
    validate_generalized_order(g, request);
    return g;
}

OrientedGraph orient_from_roots(const RequestGraph& request, const std::vector<NodeId>& roots) {
    if (roots.empty()) throw ValidationError("at least one root is required");
    std::map<NodeId, std::size_t> layer;
    std::deque<NodeId> queue;
    for (const auto& r : roots) {
        if (!request.nodes.count(r)) throw ValidationError("root " + r + " is not a request node");
        if (layer.emplace(r, 0).second) queue.push_back(r);
    }
    while (!queue.empty()) {
        const NodeId i = queue.front();
        queue.pop_front();
        for (const auto& j : request.neighbors(i))
            if (layer.emplace(j, layer.at(i) + 1).second) queue.push_back(j);
    }
    if (layer.size() != request.nodes.size()) throw ValidationError("request is not connected");
    std::vector<Edge> oriented;
    for (const auto& e : request.edges) {
        const auto key_a = std::make_pair(layer.at(e.first), e.first);
        const auto key_b = std::make_pair(layer.at(e.second), e.second);
        oriented.push_back(key_a < key_b ? e : Edge{e.second, e.first});
    }
    return make_generalized_order(request, oriented);
}

RootPair root_pair(const NodeId& a, const NodeId& b) { return a < b ? RootPair{a, b} : RootPair{b, a}; }

OrientedGraph RootRegions::region_graph(const NodeId& root) const {
    OrientedGraph g = order.edge_subgraph(edges.at(root));
    g.add_node(root);
    return g;
}

RootRegions partition_root_regions(const OrientedGraph& g) {
    if (!g.is_acyclic()) throw ValidationError("generalized order contains a directed cycle");
    RootRegions regions;
    regions.order = g;
    regions.roots = g.sources();
    std::deque<NodeId> queue;
    for (const auto& r : regions.roots) {
        regions.owner[r] = r;
        regions.nodes[r].insert(r);
        regions.edges[r];
        queue.push_back(r);
    }
    while (!queue.empty()) {
        const NodeId v = queue.front();
        queue.pop_front();
        const NodeId& r = regions.owner.at(v);
        for (const auto& e : g.out_edges(v)) {
            regions.edges[r].insert(e);
            regions.nodes[r].insert(e.second);
            if (regions.owner.emplace(e.second, r).second) queue.push_back(e.second);
        }
    }
    std::map<NodeId, std::vector<NodeId>> containing;
    for (const auto& r : regions.roots)
        for (const auto& v : regions.nodes[r]) containing[v].push_back(r);
    for (const auto& r : regions.roots) regions.boundary[r];
    for (const auto& [v, rs] : containing) {
        if (rs.size() < 2) continue;
        for (std::size_t a = 0; a < rs.size(); ++a) {
            regions.boundary[rs[a]].insert(v);
            for (std::size_t b = a + 1; b < rs.size(); ++b) regions.pairwise[root_pair(rs[a], rs[b])].insert(v);
        }
    }
    std::vector<std::string> offending;
    for (const auto& [pair, shared] : regions.pairwise) {
        regions.chain[pair] = std::vector<NodeId>(shared.begin(), shared.end());
        for (const auto& [e, reversed] : g.edges())
            if (shared.count(e.first) && shared.count(e.second)) offending.push_back(edge_name(e));
    }
    if (!offending.empty()) {
        std::string list;
        for (const auto& e : offending) list += (list.empty() ? "" : ", ") + e;
        throw ValidationError("edges between boundary nodes of the same regions are not supported: " + list);
    }
    return regions;
}

RootRegionOrder root_region_order(const RootRegions& regions, const NodeId& top) {
    if (!std::count(regions.roots.begin(), regions.roots.end(), top))
        throw ValidationError(top + " is not a root of the generalized order");
    std::map<NodeId, std::vector<NodeId>> adjacent;
    for (const auto& [pair, shared] : regions.pairwise) {
        adjacent[pair.first].push_back(pair.second);
        adjacent[pair.second].push_back(pair.first);
    }
    for (auto& [r, list] : adjacent) std::sort(list.begin(), list.end());
    RootRegionOrder rr;
    rr.root = top;
    std::map<NodeId, std::size_t> discovered{{top, 0}};
    std::deque<NodeId> queue{top};
    while (!queue.empty()) {
        const NodeId r = queue.front();
        queue.pop_front();
        rr.traversal.push_back(r);
        rr.graph.add_node(r);
        for (const auto& s : adjacent[r])
            if (discovered.emplace(s, discovered.size()).second) queue.push_back(s);
    }
    if (rr.traversal.size() != regions.roots.size())
        throw ValidationError("root regions are not connected through boundaries");
    for (const auto& [pair, shared] : regions.pairwise) {
        const bool forward = discovered.at(pair.first) < discovered.at(pair.second);
        const NodeId& from = forward ? pair.first : pair.second;
        const NodeId& to = forward ? pair.second : pair.first;
        rr.graph.add_edge(from, to, false);
        rr.incoming_boundary[to].insert(shared.begin(), shared.end());
    }
    for (const auto& r : regions.roots) rr.incoming_boundary[r];
    rr.tree_like = regions.pairwise.size() + 1 == regions.roots.size();
    return rr;
}

namespace {

std::string fresh_id(const std::set<std::string>& taken, const std::string& base) {
    if (!taken.count(base)) return base;
    for (std::size_t k = 1;; ++k)
        if (auto id = base + std::to_string(k); !taken.count(id)) return id;
}

/// Adds a zero-demand super-root with edges to @p targets to both the
/// instance and the order.
NodeId add_super_root(Instance& inst, OrientedGraph& g, const std::vector<NodeId>& targets) {
    auto types = inst.substrate.types();
    for (const auto& [i, t] : inst.request.node_type) types.insert(t);
    const TypeId type = fresh_id(types, "virtual_root");
    const NodeId s = fresh_id(inst.request.nodes, "super_root");
    for (const auto& u : inst.substrate.nodes) {
        inst.substrate.supported_types[u].insert(type);
        inst.substrate.node_capacity[{u, type}] = 1.0;
        inst.unit_cost[Resource::of_node(u, type)] = 0.0;
    }
    inst.request.nodes.insert(s);
    inst.request.node_type[s] = type;
    inst.request.node_demand[s] = 0.0;
    g.add_node(s);
    for (const auto& r : targets) {
        inst.request.edges.insert({s, r});
        inst.request.edge_demand[{s, r}] = 0.0;
        g.add_edge(s, r, false);
    }
    return s;
}

/// Nodes of some undirected cycle of the region adjacency (empty if none).
std::vector<NodeId> find_cycle(const RootRegionOrder& rr) {
    std::map<NodeId, std::vector<NodeId>> adjacent;
    for (const auto& [e, reversed] : rr.graph.edges()) {
        adjacent[e.first].push_back(e.second);
        adjacent[e.second].push_back(e.first);
    }
    for (auto& [r, list] : adjacent) std::sort(list.begin(), list.end());
    std::map<NodeId, NodeId> parent;
    std::set<NodeId> seen;
    for (const auto& start : rr.graph.nodes()) {
        if (seen.count(start)) continue;
        std::vector<NodeId> stack{start};
        parent[start] = start;
        seen.insert(start);
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            for (const auto& w : adjacent[v]) {
                if (w == parent[v]) continue;
                if (seen.count(w)) {
                    // Close the cycle through the lowest common ancestor.
                    std::vector<NodeId> up_v{v};
                    while (up_v.back() != parent[up_v.back()]) up_v.push_back(parent[up_v.back()]);
                    std::vector<NodeId> up_w{w};
                    while (std::find(up_v.begin(), up_v.end(), up_w.back()) == up_v.end())
                        up_w.push_back(parent[up_w.back()]);
                    std::vector<NodeId> cycle(up_v.begin(), std::find(up_v.begin(), up_v.end(), up_w.back()) + 1);
                    cycle.insert(cycle.end(), up_w.begin(), up_w.end() - 1);
                    std::sort(cycle.begin(), cycle.end());
                    return cycle;
                }
                seen.insert(w);
                parent[w] = v;
                stack.push_back(w);
            }
        }
    }
    return {};
}

}  // namespace

MultiRootSetup collapse_cycles(MultiRootSetup setup) {
    while (!setup.region_order.tree_like) {
        const auto cycle = find_cycle(setup.region_order);
        if (cycle.empty()) throw InvariantError("region order is not tree-like but has no cycle");
        const NodeId s = add_super_root(setup.instance, setup.order, cycle);
        setup.virtual_nodes.push_back(s);
        NodeId top = setup.region_order.root;
        if (std::count(cycle.begin(), cycle.end(), top)) top = s;
        setup.regions = partition_root_regions(setup.order);
        if (!std::count(setup.regions.roots.begin(), setup.regions.roots.end(), top)) top = s;
        setup.region_order = root_region_order(setup.regions, top);
    }
    return setup;
}

InducedOrder induced_extraction_order(const Instance& instance, const OrientedGraph& g) {
    InducedOrder out;
    out.instance = instance;
    OrientedGraph h = g;
    out.super_root = add_super_root(out.instance, h, g.sources());
    for (const auto& i : h.nodes()) out.order.add_node(i);
    for (const auto& [e, reversed] : h.edges()) out.order.add_edge(e.first, e.second, reversed);
    out.order.root = out.super_root;
    validate_order(out.order);
    return out;
}

EdgeLabelAssignment multiroot_confluence_labels(const OrientedGraph& g, const RootRegions& regions) {
    EdgeLabelAssignment out;
    for (const auto& [e, reversed] : g.edges()) out[e];
    for (const auto& r : regions.roots) {
        OrientedGraph extended = regions.region_graph(r);
        for (const auto& [pair, chain] : regions.chain) {
            if (pair.first != r && pair.second != r) continue;
            for (std::size_t k = 0; k + 1 < chain.size(); ++k) extended.add_edge(chain[k], chain[k + 1], false);
        }
        if (!extended.is_acyclic())
            throw ValidationError("boundary chain of region " + r + " contradicts the region's orientation");
        const auto labels = confluence_edge_labels(extended);
        for (const auto& e : regions.edges.at(r)) out[e] = labels.at(e);
    }
    return out;
}

std::vector<GammaScope> region_scopes(const RootRegions& regions, const EdgeLabelAssignment& labels) {
    std::vector<GammaScope> scopes;
    for (const auto& r : regions.roots) {
        OrientedGraph graph = regions.region_graph(r);
        LabelSetOrdering omega = auto_label_set_ordering(graph, labels);
        scopes.push_back({r, std::move(graph), std::move(omega)});
    }
    return scopes;
}

LpProgram build_multiroot(const Instance& instance, const OrientedGraph& g, const EdgeLabelAssignment& labels,
                          const std::vector<GammaScope>& scopes) {
    validate_generalized_order(g, instance.request);
    for (const auto& scope : scopes) {
        auto rep = validate_ordering(scope.graph, labels, scope.omega);
        if (!rep.passed())
            throw ValidationError("invalid label set ordering in region " + scope.tag + ": " +
                                  rep.violations.front().message);
    }
    return build_adapted_scoped(instance, g, labels, scopes);
}

ConvexCombination decompose_multiroot(const Instance& instance, const OrientedGraph& g, const RootRegions& regions,
                                      const RootRegionOrder& region_order, const EdgeLabelAssignment& labels,
                                      const std::vector<GammaScope>& scopes, const Assignment& solution,
                                      double epsilon) {
    if (!region_order.tree_like) throw ValidationError("stitching requires a tree-like root region order");
    (void)g;
    // Stage 1: independent decompositions per region.
    struct Store {
        std::vector<CombinationEntry> entries;
        std::map<LabelMapping, std::vector<std::size_t>> by_boundary;
    };
    std::map<NodeId, Store> stores;
    for (const auto& scope : scopes) {
        if (!regions.nodes.count(scope.tag)) throw ValidationError("scope " + scope.tag + " is not a region root");
        DecomposeOptions opt;
        opt.epsilon = epsilon;
        opt.scope = scope.tag;
        auto d = decompose_rip(instance, scope.graph, scope.tag, labels, scope.omega, solution, opt);
        Store& store = stores[scope.tag];
        const auto& boundary = region_order.incoming_boundary.at(scope.tag);
        for (auto& entry : d.entries) {
            const LabelMapping full(entry.mapping.node_map.begin(), entry.mapping.node_map.end());
            store.by_boundary[restrict_mapping(full, boundary)].push_back(store.entries.size());
            store.entries.push_back(std::move(entry));
        }
    }
    for (const auto& r : region_order.traversal)
        if (!stores.count(r)) throw ValidationError("no scope for region " + r);

    // Stage 2: stitch along the region order.
    ConvexCombination out;
    std::map<Mapping, std::size_t> position;
    double remaining = 1.0;
    while (remaining > epsilon) {
        Mapping merged;
        std::vector<std::pair<Store*, std::size_t>> chosen;
        bool exhausted = false;
        for (const auto& r : region_order.traversal) {
            Store& store = stores.at(r);
            const auto& boundary = region_order.incoming_boundary.at(r);
            const auto key = restrict_mapping(LabelMapping(merged.node_map.begin(), merged.node_map.end()), boundary);
            std::optional<std::size_t> pick;
            auto bucket = store.by_boundary.find(key);
            if (key.size() == boundary.size() && bucket != store.by_boundary.end())
                for (auto idx : bucket->second)
                    if (store.entries[idx].value > epsilon &&
                        (!pick || store.entries[idx].value > store.entries[*pick].value))
                        pick = idx;
            if (!pick) {
                if (r == region_order.root && remaining <= 1e-6) {
                    exhausted = true;
                    break;
                }
                throw InvariantError("stitching failed: region " + r + " has no mapping for boundary images {" +
                                     mapping_key(key) + "}");
            }
            const Mapping& part = store.entries[*pick].mapping;
            for (const auto& [i, u] : part.node_map) {
                auto [it, fresh] = merged.node_map.emplace(i, u);
                if (!fresh && it->second != u)
                    throw InvariantError("stitching conflict at " + i + ": " + it->second + " vs " + u);
            }
            for (const auto& [e, path] : part.edge_map) merged.edge_map[e] = path;
            chosen.emplace_back(&store, *pick);
        }
        if (exhausted) break;
        double f = std::numeric_limits<double>::infinity();
        for (const auto& [store, idx] : chosen) f = std::min(f, store->entries[idx].value);
        for (const auto& [store, idx] : chosen) {
            double& v = store->entries[idx].value;
            v -= f;
            if (v < epsilon) v = 0.0;
        }
        remaining -= f;
        auto [it, fresh] = position.emplace(merged, out.entries.size());
        if (fresh)
            out.entries.push_back({f, std::move(merged)});
        else
            out.entries[it->second].value += f;
    }
    return out;
}

nlohmann::json region_report(const RootRegions& regions, const RootRegionOrder& region_order,
                             const EdgeLabelAssignment& labels, const std::vector<GammaScope>& scopes) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& scope : scopes) {
        const auto& r = scope.tag;
        list.push_back({{"root", r},
                        {"nodes", regions.nodes.at(r).size()},
                        {"edges", regions.edges.at(r).size()},
                        {"boundary", regions.boundary.at(r)},
                        {"extraction_width", extraction_width(scope.graph, labels)},
                        {"extraction_label_width", extraction_label_width(scope.omega)}});
    }
    nlohmann::json boundaries = nlohmann::json::array();
    for (const auto& [pair, shared] : regions.pairwise)
        boundaries.push_back({{"regions", {pair.first, pair.second}}, {"nodes", shared}});
    return {{"roots", regions.roots},
            {"top", region_order.root},
            {"tree_like", region_order.tree_like},
            {"regions", list},
            {"boundaries", boundaries}};
}

}  // namespace vnep
