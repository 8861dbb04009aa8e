/**
 * @file oracles.cpp
 * @brief Test-side reference implementations (see oracles.hpp).
 */
#include "oracles/oracles.hpp"

#include <algorithm>
#include <functional>
#include <random>

#include "vnep/generators.hpp"

namespace oracle {

std::vector<std::vector<NodeId>> directed_paths(const OrientedGraph& g, const NodeId& from, const NodeId& to) {
    std::vector<std::vector<NodeId>> out;
    std::vector<NodeId> current{from};
    std::function<void(const NodeId&)> walk = [&](const NodeId& at) {
        if (at == to && current.size() > 1) {
            out.push_back(current);
            return;
        }
        for (const auto& [tail, head] : g.out_edges(at)) {
            current.push_back(head);
            walk(head);
            current.pop_back();
        }
    };
    if (from != to) walk(from);
    return out;
}

EdgeLabelAssignment brute_force_confluence_labels(const OrientedGraph& g) {
    EdgeLabelAssignment labels;
    for (const auto& [e, reversed] : g.edges()) labels[e];
    for (const auto& s : g.nodes())
        for (const auto& j : g.nodes()) {
            const auto paths = directed_paths(g, s, j);
            for (std::size_t a = 0; a < paths.size(); ++a)
                for (std::size_t b = a + 1; b < paths.size(); ++b) {
                    const std::set<NodeId> inner_a(paths[a].begin() + 1, paths[a].end() - 1);
                    bool disjoint = true;
                    for (std::size_t x = 1; x + 1 < paths[b].size(); ++x)
                        if (inner_a.count(paths[b][x])) disjoint = false;
                    if (!disjoint) continue;
                    for (const auto* p : {&paths[a], &paths[b]})
                        for (std::size_t x = 0; x + 1 < p->size(); ++x) labels[{(*p)[x], (*p)[x + 1]}].insert(j);
                }
        }
    return labels;
}

std::vector<std::pair<std::set<Edge>, LabelSet>> naive_edge_bags(const OrientedGraph& g,
                                                                 const EdgeLabelAssignment& labels, const NodeId& i) {
    std::vector<std::pair<std::set<Edge>, LabelSet>> bags;
    for (const auto& e : g.out_edges(i)) bags.push_back({{e}, labels.at(e)});
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t a = 0; a < bags.size() && !merged; ++a)
            for (std::size_t b = a + 1; b < bags.size() && !merged; ++b) {
                LabelSet common;
                std::set_intersection(bags[a].second.begin(), bags[a].second.end(), bags[b].second.begin(),
                                      bags[b].second.end(), std::inserter(common, common.end()));
                if (common.empty()) continue;
                bags[a].first.insert(bags[b].first.begin(), bags[b].first.end());
                bags[a].second.insert(bags[b].second.begin(), bags[b].second.end());
                bags.erase(bags.begin() + static_cast<std::ptrdiff_t>(b));
                merged = true;
            }
    }
    return bags;
}

namespace {

using Assignment = std::map<NodeId, NodeId>;

std::vector<Assignment> all_assignments(const Instance& inst, const LabelSet& labels) {
    std::vector<Assignment> out{{}};
    for (const auto& k : labels) {
        std::vector<Assignment> next;
        for (const auto& partial : out)
            for (const auto& u : inst.substrate.nodes)
                if (inst.substrate.supports(u, inst.request.node_type.at(k))) {
                    auto m = partial;
                    m[k] = u;
                    next.push_back(m);
                }
        out = next;
    }
    return out;
}

Assignment restricted(const Assignment& m, const LabelSet& to) {
    Assignment out;
    for (const auto& [k, u] : m)
        if (to.count(k)) out[k] = u;
    return out;
}

std::string key(const Assignment& m) {
    std::string s;
    for (const auto& [k, u] : m) s += k + "=" + u + ";";
    return s;
}

LabelSet intersection(const LabelSet& a, const LabelSet& b) {
    LabelSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

}  // namespace

vnep::LpProgram literal_base_program(const Instance& inst, const vnep::ExtractionOrder& order,
                                     const EdgeLabelAssignment& labels) {
    using vnep::LpTerm;
    using vnep::Relation;
    vnep::LpProgram lp;
    auto hosts = [&](const NodeId& i) {
        std::vector<NodeId> out;
        for (const auto& u : inst.substrate.nodes)
            if (inst.substrate.supports(u, inst.request.node_type.at(i))) out.push_back(u);
        return out;
    };
    auto node_fits = [&](const NodeId& i, const NodeId& u) {
        return inst.request.node_demand.at(i) <=
               inst.capacity(vnep::Resource::of_node(u, inst.request.node_type.at(i)));
    };
    auto Y = [](const NodeId& i, const NodeId& u) { return "Y(" + i + "," + u + ")"; };
    auto SY = [](const Edge& e, const Assignment& m, const NodeId& i, const NodeId& u) {
        return "SY(" + e.first + ">" + e.second + "," + key(m) + "," + i + "," + u + ")";
    };
    auto SZ = [](const Edge& e, const Assignment& m, const Edge& arc) {
        return "SZ(" + e.first + ">" + e.second + "," + key(m) + "," + arc.first + ">" + arc.second + ")";
    };
    auto G = [](const NodeId& i, std::size_t b, const Assignment& beta, const NodeId& u) {
        return "G(" + i + "," + std::to_string(b) + "," + key(beta) + "," + u + ")";
    };
    auto A = [](const vnep::Resource& r) { return "A(" + r.name() + ")"; };

    // Global node variables and allocation variables.
    for (const auto& i : inst.request.nodes)
        for (const auto& u : hosts(i)) lp.add_variable(Y(i, u), 0.0, 1.0);
    for (const auto& r : inst.resources()) lp.add_variable(A(r), 0.0, inst.capacity(r));

    // Subformulations (flow constraints of the base MCF program without the
    // embedding row), one per oriented edge and mapping of its labels.
    std::map<Edge, std::vector<LpTerm>> edge_load;
    for (const auto& [oe, reversed] : order.edges()) {
        const Edge e = order.original(oe);
        for (const auto& m : all_assignments(inst, labels.at(oe))) {
            for (const auto& i : {e.first, e.second})
                for (const auto& u : hosts(i)) lp.add_variable(SY(e, m, i, u), 0.0, node_fits(i, u) ? 1.0 : 0.0);
            for (const auto& arc : inst.substrate.edges) {
                const bool fits =
                    inst.request.edge_demand.at(e) <= inst.capacity(vnep::Resource::of_edge(arc));
                auto v = lp.add_variable(SZ(e, m, arc), 0.0, fits ? 1.0 : 0.0);
                edge_load[arc].push_back({v, -inst.request.edge_demand.at(e)});
            }
            for (const auto& u : inst.substrate.nodes) {
                std::vector<LpTerm> row;
                for (const auto& arc : inst.substrate.edges) {
                    if (arc.first == u) row.push_back({lp.index(SZ(e, m, arc)), 1.0});
                    if (arc.second == u) row.push_back({lp.index(SZ(e, m, arc)), -1.0});
                }
                if (auto v = lp.find(SY(e, m, e.first, u))) row.push_back({*v, -1.0});
                if (auto v = lp.find(SY(e, m, e.second, u))) row.push_back({*v, 1.0});
                lp.add_constraint("conserve", row, Relation::Equal, 0.0);
            }
            // Forbid mappings of the head that disagree with the edge's label mapping.
            const NodeId head = oe.second;
            if (m.count(head))
                for (const auto& u : hosts(head))
                    if (u != m.at(head)) lp.set_bounds(lp.index(SY(e, m, head, u)), 0.0, 0.0);
        }
    }

    // Node embedding and node-to-subformulation aggregation.
    for (const auto& i : inst.request.nodes) {
        std::vector<LpTerm> row;
        for (const auto& u : hosts(i)) row.push_back({lp.index(Y(i, u)), 1.0});
        lp.add_constraint("embed", row, Relation::Equal, 1.0);
    }
    for (const auto& [oe, reversed] : order.edges()) {
        const Edge e = order.original(oe);
        for (const auto& i : {e.first, e.second})
            for (const auto& u : hosts(i)) {
                std::vector<LpTerm> row{{lp.index(Y(i, u)), 1.0}};
                for (const auto& m : all_assignments(inst, labels.at(oe))) row.push_back({lp.index(SY(e, m, i, u)), -1.0});
                lp.add_constraint("to_sub", row, Relation::Equal, 0.0);
            }
    }

    // Bag variables: out-edges to gamma, in-edges to gamma.
    for (const auto& i : order.nodes()) {
        const auto bags = naive_edge_bags(order, labels, i);
        for (std::size_t b = 0; b < bags.size(); ++b) {
            const LabelSet& bag_labels = bags[b].second;
            const auto betas = all_assignments(inst, bag_labels);
            for (const auto& u : hosts(i))
                for (const auto& beta : betas) lp.add_variable(G(i, b, beta, u), 0.0, 1.0);
            for (const auto& oe : bags[b].first) {
                const Edge e = order.original(oe);
                const LabelSet& le = labels.at(oe);
                for (const auto& u : hosts(i))
                    for (const auto& m : all_assignments(inst, le)) {
                        std::vector<LpTerm> row{{lp.index(SY(e, m, i, u)), 1.0}};
                        for (const auto& beta : betas)
                            if (restricted(beta, intersection(bag_labels, le)) == m)
                                row.push_back({lp.index(G(i, b, beta, u)), -1.0});
                        lp.add_constraint("gamma_out", row, Relation::Equal, 0.0);
                    }
            }
            for (const auto& ie : order.in_edges(i)) {
                const Edge e = order.original(ie);
                const LabelSet& le = labels.at(ie);
                const LabelSet shared = intersection(bag_labels, le);
                for (const auto& u : hosts(i))
                    for (const auto& mu : all_assignments(inst, shared)) {
                        std::vector<LpTerm> row;
                        for (const auto& m : all_assignments(inst, le))
                            if (restricted(m, shared) == mu) row.push_back({lp.index(SY(e, m, i, u)), 1.0});
                        for (const auto& beta : betas)
                            if (restricted(beta, shared) == mu) row.push_back({lp.index(G(i, b, beta, u)), -1.0});
                        lp.add_constraint("gamma_in", row, Relation::Equal, 0.0);
                    }
            }
        }
    }

    // Loads and objective.
    std::vector<LpTerm> objective;
    for (const auto& r : inst.resources()) {
        std::vector<LpTerm> row{{lp.index(A(r)), 1.0}};
        if (r.kind == vnep::Resource::Kind::Node) {
            for (const auto& i : inst.request.nodes)
                if (inst.request.node_type.at(i) == r.detail)
                    row.push_back({lp.index(Y(i, r.node)), -inst.request.node_demand.at(i)});
        } else {
            const auto& terms = edge_load[r.edge()];
            row.insert(row.end(), terms.begin(), terms.end());
        }
        lp.add_constraint("load", row, Relation::Equal, 0.0);
        objective.push_back({lp.index(A(r)), inst.cost(r)});
    }
    lp.set_objective(objective, vnep::Sense::Minimize);
    return lp;
}

std::size_t count_simple_paths(const vnep::SubstrateGraph& substrate, const NodeId& from, const NodeId& to,
                               std::size_t max_hops) {
    std::set<NodeId> on_path{from};
    std::function<std::size_t(const NodeId&, std::size_t)> count = [&](const NodeId& at, std::size_t hops) {
        if (at == to) return std::size_t{1};
        if (hops == max_hops) return std::size_t{0};
        std::size_t total = 0;
        for (const auto& [tail, head] : substrate.edges) {
            if (tail != at || on_path.count(head)) continue;
            on_path.insert(head);
            total += count(head, hops + 1);
            on_path.erase(head);
        }
        return total;
    };
    return count(from, 0);
}

std::map<vnep::Resource, double> direct_allocations(const Instance& inst, const vnep::Mapping& m) {
    std::map<vnep::Resource, double> out;
    for (const auto& r : inst.resources()) {
        double total = 0.0;
        if (r.kind == vnep::Resource::Kind::Node) {
            for (const auto& i : inst.request.nodes)
                if (inst.request.node_type.at(i) == r.detail && m.node_map.at(i) == r.node)
                    total += inst.request.node_demand.at(i);
        } else {
            for (const auto& e : inst.request.edges)
                for (const auto& arc : m.edge_map.at(e))
                    if (arc == r.edge()) total += inst.request.edge_demand.at(e);
        }
        if (total != 0.0) out[r] = total;
    }
    return out;
}

WidenedOrdering widened_ordering(const OrientedGraph& region, const EdgeLabelAssignment& plain,
                                 const vnep::LabelSetOrdering& plain_omega, const EdgeLabelAssignment& multi) {
    WidenedOrdering out;
    for (const auto& [e, reversed] : region.edges())
        for (const auto& k : multi.at(e))
            if (!plain.at(e).count(k)) out.added.insert(k);
    for (const auto& i : region.nodes()) {
        std::vector<LabelSet> sets;
        LabelSet incoming;
        if (!region.in_edges(i).empty()) incoming = multi.at(region.in_edges(i).front());
        sets.push_back(incoming);
        for (const auto& s : plain_omega.at(i).sets) {
            LabelSet widened = s;
            widened.insert(out.added.begin(), out.added.end());
            if (std::find(sets.begin(), sets.end(), widened) == sets.end()) sets.push_back(widened);
        }
        out.omega.nodes.emplace(i, vnep::make_node_ordering(region, multi, i, sets));
    }
    return out;
}

std::vector<std::pair<NodeId, NodeId>> random_connected_edges(std::uint64_t seed, const std::vector<NodeId>& nodes,
                                                              double extra_edge_probability) {
    std::mt19937_64 rng(seed);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t k = 1; k < nodes.size(); ++k) edges.emplace_back(nodes[rng() % k], nodes[k]);
    for (std::size_t a = 0; a < nodes.size(); ++a)
        for (std::size_t b = a + 1; b < nodes.size(); ++b) {
            const bool present = std::count(edges.begin(), edges.end(), std::make_pair(nodes[a], nodes[b])) > 0;
            if (!present && static_cast<double>(rng() % 1000) < extra_edge_probability * 1000.0)
                edges.emplace_back(nodes[a], nodes[b]);
        }
    return edges;
}

TwoRegionCase random_two_region_case(std::uint64_t seed) {
    std::mt19937_64 rng(seed * 7919 + 17);
    const std::size_t shared = 1 + rng() % 3;
    std::vector<NodeId> boundary;
    for (std::size_t k = 0; k < shared; ++k) boundary.push_back("x" + std::to_string(k));
    std::set<NodeId> nodes(boundary.begin(), boundary.end());
    std::set<Edge> edges;
    for (const std::string prefix : {"a", "b"}) {
        const std::size_t size = 3 + rng() % 3;
        std::vector<NodeId> piece;
        for (std::size_t k = 0; k < size; ++k) piece.push_back(prefix + std::to_string(k));
        nodes.insert(piece.begin(), piece.end());
        for (const auto& e : random_connected_edges(rng(), piece, 0.3)) edges.insert(e);
        // Every boundary node is entered from one or two nodes of the piece.
        for (const auto& x : boundary) {
            const std::size_t fan_in = 1 + rng() % 2;
            for (std::size_t k = 0; k < fan_in; ++k) edges.insert({piece[rng() % size], x});
        }
    }
    TwoRegionCase out;
    out.instance = vnep::instance_on_complete_substrate(nodes, edges, {.nodes = 3});
    out.order = vnep::make_generalized_order(out.instance.request, {edges.begin(), edges.end()});
    return out;
}

}  // namespace oracle
