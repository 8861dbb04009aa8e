/**
 * @file orderings.cpp
 * @brief Join trees, running intersection orderings, edge bags and
 *        extraction label set orderings.
 */
#include "vnep/orderings.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "vnep/error.hpp"

namespace vnep {

namespace {

bool is_subset(const LabelSet& a, const LabelSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

LabelSet intersect(const LabelSet& a, const LabelSet& b) {
    LabelSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

LabelSet unite(const LabelSet& a, const LabelSet& b) {
    LabelSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

/// Minimal union-find over indices.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[std::max(a, b)] = std::min(a, b);
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

/// Tree path between two nodes of a join tree (inclusive).
std::vector<std::size_t> tree_path(const std::vector<std::vector<std::size_t>>& adj, std::size_t from,
                                   std::size_t to) {
    std::vector<std::size_t> parent(adj.size(), adj.size());
    std::vector<std::size_t> stack{from};
    parent[from] = from;
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto w : adj[v])
            if (parent[w] == adj.size()) {
                parent[w] = v;
                stack.push_back(w);
            }
    }
    std::vector<std::size_t> path{to};
    while (path.back() != from) path.push_back(parent[path.back()]);
    return path;
}

}  // namespace

SetFamily SetFamily::deduplicated() const {
    std::set<LabelSet> uniq(sets.begin(), sets.end());
    return {std::vector<LabelSet>(uniq.begin(), uniq.end())};
}

SetFamily SetFamily::maximal() const {
    auto uniq = deduplicated().sets;
    SetFamily out;
    for (std::size_t a = 0; a < uniq.size(); ++a) {
        bool dominated = false;
        for (std::size_t b = 0; b < uniq.size() && !dominated; ++b)
            dominated = a != b && is_subset(uniq[a], uniq[b]);
        if (!dominated) out.sets.push_back(uniq[a]);
    }
    return out;
}

// ---------------------------------------------------------------- join trees

std::optional<JoinTree> join_tree(const SetFamily& family) {
    JoinTree tree{family.sets, {}};
    const std::size_t n = tree.sets.size();
    if (n == 0) return tree;
    struct Candidate {
        std::size_t weight;
        std::size_t a, b;
    };
    std::vector<Candidate> candidates;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            candidates.push_back({intersect(tree.sets[a], tree.sets[b]).size(), a, b});
    // Heaviest first; ties by set contents, then position, for determinism.
    std::stable_sort(candidates.begin(), candidates.end(), [&](const Candidate& x, const Candidate& y) {
        if (x.weight != y.weight) return x.weight > y.weight;
        return std::tie(tree.sets[x.a], tree.sets[x.b]) < std::tie(tree.sets[y.a], tree.sets[y.b]);
    });
    DisjointSets dsu(n);
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& c : candidates)
        if (dsu.unite(c.a, c.b)) {
            tree.edges.emplace_back(c.a, c.b);
            adj[c.a].push_back(c.b);
            adj[c.b].push_back(c.a);
        }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            auto common = intersect(tree.sets[a], tree.sets[b]);
            if (common.empty()) continue;
            for (auto v : tree_path(adj, a, b))
                if (!is_subset(common, tree.sets[v])) return std::nullopt;
        }
    return tree;
}

bool has_running_intersection_property(const std::vector<LabelSet>& ordering) {
    LabelSet seen;
    for (std::size_t a = 0; a < ordering.size(); ++a) {
        auto overlap = intersect(ordering[a], seen);
        bool held = overlap.empty();
        for (std::size_t b = 0; b < a && !held; ++b) held = is_subset(overlap, ordering[b]);
        if (!held) return false;
        seen.insert(ordering[a].begin(), ordering[a].end());
    }
    return true;
}

std::optional<std::vector<LabelSet>> running_intersection_ordering(const SetFamily& family,
                                                                   const std::optional<LabelSet>& start) {
    auto tree = join_tree(family);
    if (!tree) return std::nullopt;
    const std::size_t n = tree->sets.size();
    if (n == 0) return std::vector<LabelSet>{};
    std::size_t first = 0;
    if (start) {
        auto it = std::find(tree->sets.begin(), tree->sets.end(), *start);
        if (it == tree->sets.end()) throw ValidationError("start set " + label_set_name(*start) + " not in family");
        first = static_cast<std::size_t>(it - tree->sets.begin());
    }
    std::vector<std::vector<std::size_t>> adj(n);
    for (auto [a, b] : tree->edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& children : adj)
        std::sort(children.begin(), children.end(), [&](std::size_t x, std::size_t y) {
            return std::tie(tree->sets[x], x) < std::tie(tree->sets[y], y);
        });
    std::vector<LabelSet> order;
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{first};
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        if (seen[v]) continue;
        seen[v] = true;
        order.push_back(tree->sets[v]);
        for (auto it = adj[v].rbegin(); it != adj[v].rend(); ++it)
            if (!seen[*it]) stack.push_back(*it);
    }
    return order;
}

// ---------------------------------------------------------------- edge bags

std::vector<EdgeBag> edge_bags(const OrientedGraph& g, const EdgeLabelAssignment& labels, const NodeId& i) {
    const auto& out = g.out_edges(i);
    DisjointSets dsu(out.size());
    std::map<NodeId, std::size_t> owner;
    for (std::size_t x = 0; x < out.size(); ++x) {
        auto it = labels.find(out[x]);
        if (it == labels.end()) continue;
        for (const auto& k : it->second) {
            auto [pos, fresh] = owner.emplace(k, x);
            if (!fresh) dsu.unite(pos->second, x);
        }
    }
    std::vector<EdgeBag> bags;
    std::map<std::size_t, std::size_t> bag_of_root;
    for (std::size_t x = 0; x < out.size(); ++x) {
        auto [pos, fresh] = bag_of_root.emplace(dsu.find(x), bags.size());
        if (fresh) bags.emplace_back();
        auto& bag = bags[pos->second];
        bag.edges.push_back(out[x]);
        if (auto it = labels.find(out[x]); it != labels.end()) bag.labels.insert(it->second.begin(), it->second.end());
    }
    return bags;
}

// ---------------------------------------------------------------- orderings

const NodeOrdering& LabelSetOrdering::at(const NodeId& i) const {
    auto it = nodes.find(i);
    if (it == nodes.end()) throw ValidationError("label set ordering has no entry for node " + i);
    return it->second;
}

NodeOrdering make_node_ordering(const OrientedGraph& g, const EdgeLabelAssignment& labels, const NodeId& i,
                                std::vector<LabelSet> sets) {
    NodeOrdering w;
    w.sets = std::move(sets);
    for (const auto& e : g.out_edges(i)) {
        auto it = labels.find(e);
        const LabelSet empty;
        const LabelSet& le = it == labels.end() ? empty : it->second;
        for (std::size_t a = 0; a < w.sets.size(); ++a)
            if (is_subset(le, w.sets[a])) {
                w.representative[e] = a;
                break;
            }
    }
    LabelSet seen;
    for (std::size_t a = 0; a < w.sets.size(); ++a) {
        auto pred = intersect(w.sets[a], seen);
        std::size_t index = a;
        if (!pred.empty())
            for (std::size_t b = 0; b < a; ++b)
                if (is_subset(pred, w.sets[b])) {
                    index = b;
                    break;
                }
        w.predecessor_set.push_back(std::move(pred));
        w.predecessor_index.push_back(index);
        seen.insert(w.sets[a].begin(), w.sets[a].end());
    }
    return w;
}

LabelSetOrdering bag_label_set_ordering(const OrientedGraph& g, const EdgeLabelAssignment& labels) {
    LabelSetOrdering omega;
    for (const auto& i : g.nodes()) {
        std::vector<LabelSet> sets{incoming_labels(g, labels, i)};
        for (auto& bag : edge_bags(g, labels, i)) sets.push_back(std::move(bag.labels));
        omega.nodes.emplace(i, make_node_ordering(g, labels, i, std::move(sets)));
    }
    return omega;
}

namespace {

/// Drops out-sets contained in the incoming set or in another out-set.
std::vector<LabelSet> maximal_out_sets(const LabelSet& incoming, const std::vector<LabelSet>& out_sets) {
    std::vector<LabelSet> kept;
    for (const auto& s : SetFamily{out_sets}.maximal().sets)
        if (!is_subset(s, incoming)) kept.push_back(s);
    return kept;
}

std::vector<LabelSet> auto_node_sets(const LabelSet& incoming, std::vector<LabelSet> out_sets) {
    out_sets = maximal_out_sets(incoming, out_sets);
    while (true) {
        SetFamily family{{incoming}};
        family.sets.insert(family.sets.end(), out_sets.begin(), out_sets.end());
        if (auto ordering = running_intersection_ordering(family, incoming)) return *ordering;
        // α-cyclic: merge the overlapping out-set pair with the smallest union.
        std::optional<std::tuple<std::size_t, LabelSet, std::size_t, std::size_t>> best;
        for (std::size_t a = 0; a < out_sets.size(); ++a)
            for (std::size_t b = a + 1; b < out_sets.size(); ++b) {
                if (intersect(out_sets[a], out_sets[b]).empty()) continue;
                auto merged = unite(out_sets[a], out_sets[b]);
                auto key = std::make_tuple(merged.size(), merged, a, b);
                if (!best || key < *best) best = key;
            }
        if (!best) throw InvariantError("α-cyclic label family without overlapping out-sets");
        auto [size, merged, a, b] = *best;
        out_sets.erase(out_sets.begin() + static_cast<std::ptrdiff_t>(b));
        out_sets[a] = merged;
        out_sets = maximal_out_sets(incoming, out_sets);
    }
}

}  // namespace

LabelSetOrdering auto_label_set_ordering(const OrientedGraph& g, const EdgeLabelAssignment& labels) {
    LabelSetOrdering omega;
    for (const auto& i : g.nodes()) {
        std::vector<LabelSet> out_sets;
        for (const auto& e : g.out_edges(i))
            if (auto it = labels.find(e); it != labels.end()) out_sets.push_back(it->second);
        auto sets = auto_node_sets(incoming_labels(g, labels, i), std::move(out_sets));
        omega.nodes.emplace(i, make_node_ordering(g, labels, i, std::move(sets)));
    }
    return omega;
}

OrderingReport validate_ordering(const OrientedGraph& g, const EdgeLabelAssignment& labels,
                                 const LabelSetOrdering& omega) {
    OrderingReport rep;
    for (const auto& i : g.nodes()) {
        auto it = omega.nodes.find(i);
        if (it == omega.nodes.end()) {
            rep.violations.push_back({i, 2, "no label set sequence for node " + i});
            continue;
        }
        const auto& w = it->second;
        if (!has_running_intersection_property(w.sets)) {
            rep.violations.push_back({i, 1, "sequence of " + i + " violates the running intersection property"});
            continue;
        }
        if (w.sets.empty() || w.sets.front() != incoming_labels(g, labels, i)) {
            rep.violations.push_back({i, 2, "first set of " + i + " differs from its incoming label set"});
            continue;
        }
        for (const auto& e : g.out_edges(i)) {
            auto le = labels.count(e) ? labels.at(e) : LabelSet{};
            std::optional<std::size_t> first;
            for (std::size_t a = 0; a < w.sets.size() && !first; ++a)
                if (is_subset(le, w.sets[a])) first = a;
            auto rep_it = w.representative.find(e);
            if (!first || rep_it == w.representative.end() || rep_it->second != *first) {
                rep.violations.push_back({i, 3, "out-edge " + edge_name(e) + " has no valid representative"});
                break;
            }
        }
    }
    return rep;
}

int extraction_width(const OrientedGraph& g, const EdgeLabelAssignment& labels) {
    std::size_t widest = 0;
    for (const auto& i : g.nodes())
        for (const auto& bag : edge_bags(g, labels, i)) widest = std::max(widest, bag.labels.size());
    return 1 + static_cast<int>(widest);
}

int extraction_label_width(const LabelSetOrdering& omega) {
    std::size_t widest = 0;
    for (const auto& [i, w] : omega.nodes)
        for (const auto& s : w.sets) widest = std::max(widest, s.size());
    return 1 + static_cast<int>(widest);
}

// --------------------------------------------------------------- hypergraph

ExtractionOrder hypergraph_extraction_order(const SetFamily& family) {
    if (family.sets.empty()) throw ValidationError("hypergraph construction needs a nonempty family");
    std::map<NodeId, int> occurrences;
    for (const auto& s : family.sets) {
        if (s.empty()) throw ValidationError("hypergraph construction rejects the empty set");
        for (const auto& k : s) {
            check_identifier(k, "label");
            ++occurrences[k];
        }
    }
    ExtractionOrder order;
    order.root = "hx_root";
    std::vector<NodeId> set_nodes;
    for (std::size_t a = 0; a < family.sets.size(); ++a) set_nodes.push_back("hx_set" + std::to_string(a + 1));
    for (const auto& name : set_nodes)
        if (occurrences.count(name) || occurrences.count(order.root))
            throw ValidationError("label name collides with construction node " + name);
    order.add_node(order.root);
    for (std::size_t a = 0; a < family.sets.size(); ++a) {
        order.add_edge(order.root, set_nodes[a], false);
        for (const auto& k : family.sets[a]) order.add_edge(set_nodes[a], k, false);
    }
    for (const auto& [k, count] : occurrences)
        if (count == 1) order.add_edge(order.root, k, false);
    validate_order(order);
    return order;
}

UndirectedGraph label_set_graph(const SetFamily& family) {
    UndirectedGraph graph;
    for (const auto& s : family.sets) {
        graph.nodes.insert(s.begin(), s.end());
        for (auto a = s.begin(); a != s.end(); ++a)
            for (auto b = std::next(a); b != s.end(); ++b) graph.edges.emplace(*a, *b);
    }
    return graph;
}

}  // namespace vnep
