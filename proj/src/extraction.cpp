/**
 * @file extraction.cpp
 * @brief Oriented graphs, BFS orientation and confluence edge labels.
 */
#include "vnep/extraction.hpp"

#include <algorithm>
#include <deque>
#include <queue>

#include "vnep/error.hpp"

namespace vnep {

using nlohmann::json;

const std::vector<Edge> OrientedGraph::kNoEdges{};

void OrientedGraph::add_node(const NodeId& i) { nodes_.insert(i); }

void OrientedGraph::add_edge(const NodeId& tail, const NodeId& head, bool reversed) {
    Edge e{tail, head};
    if (!edges_.emplace(e, reversed).second) return;
    nodes_.insert(tail);
    nodes_.insert(head);
    auto insert_sorted = [](std::vector<Edge>& v, const Edge& x, bool by_head) {
        auto pos = std::lower_bound(v.begin(), v.end(), x, [by_head](const Edge& a, const Edge& b) {
            return by_head ? a.second < b.second : a.first < b.first;
        });
        v.insert(pos, x);
    };
    insert_sorted(out_[tail], e, true);
    insert_sorted(in_[head], e, false);
}

Edge OrientedGraph::original(const Edge& e) const {
    return edges_.at(e) ? Edge{e.second, e.first} : e;
}

const std::vector<Edge>& OrientedGraph::out_edges(const NodeId& i) const {
    auto it = out_.find(i);
    return it == out_.end() ? kNoEdges : it->second;
}

const std::vector<Edge>& OrientedGraph::in_edges(const NodeId& i) const {
    auto it = in_.find(i);
    return it == in_.end() ? kNoEdges : it->second;
}

std::vector<NodeId> OrientedGraph::sources() const {
    std::vector<NodeId> out;
    for (const auto& i : nodes_)
        if (in_edges(i).empty()) out.push_back(i);
    return out;
}

std::vector<NodeId> OrientedGraph::topological_order() const {
    std::map<NodeId, std::size_t> indeg;
    std::set<NodeId> ready;
    for (const auto& i : nodes_) {
        indeg[i] = in_edges(i).size();
        if (indeg[i] == 0) ready.insert(i);
    }
    std::vector<NodeId> order;
    while (!ready.empty()) {
        NodeId i = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(i);
        for (const auto& e : out_edges(i))
            if (--indeg[e.second] == 0) ready.insert(e.second);
    }
    if (order.size() != nodes_.size()) return {};
    return order;
}

bool OrientedGraph::is_acyclic() const { return topological_order().size() == nodes_.size(); }

std::set<NodeId> OrientedGraph::reachable_from(const NodeId& i) const {
    std::set<NodeId> seen{i};
    std::vector<NodeId> stack{i};
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (const auto& e : out_edges(v))
            if (seen.insert(e.second).second) stack.push_back(e.second);
    }
    return seen;
}

std::set<NodeId> OrientedGraph::ancestors_of(const NodeId& i) const {
    std::set<NodeId> seen{i};
    std::vector<NodeId> stack{i};
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (const auto& e : in_edges(v))
            if (seen.insert(e.first).second) stack.push_back(e.first);
    }
    return seen;
}

OrientedGraph OrientedGraph::edge_subgraph(const std::set<Edge>& edges) const {
    OrientedGraph sub;
    for (const auto& e : edges) sub.add_edge(e.first, e.second, is_reversed(e));
    return sub;
}

std::string label_set_name(const LabelSet& s) {
    std::string out = "{";
    for (const auto& k : s) {
        if (out.size() > 1) out += ",";
        out += k;
    }
    return out + "}";
}

LabelSet incoming_labels(const OrientedGraph& g, const EdgeLabelAssignment& labels, const NodeId& i) {
    const auto& in = g.in_edges(i);
    if (in.empty()) return {};
    auto it = labels.find(in.front());
    return it == labels.end() ? LabelSet{} : it->second;
}

// ------------------------------------------------------------- construction

void validate_order(const ExtractionOrder& order) {
    if (!order.has_node(order.root)) throw ValidationError("root " + order.root + " is not a node of the order");
    if (!order.is_acyclic()) throw ValidationError("orientation contains a directed cycle");
    if (order.reachable_from(order.root).size() != order.nodes().size())
        throw ValidationError("not every node is reachable from root " + order.root);
}

ExtractionOrder make_order(const RequestGraph& request, const NodeId& root, const std::vector<Edge>& oriented) {
    ExtractionOrder order;
    order.root = root;
    for (const auto& i : request.nodes) order.add_node(i);
    for (const auto& e : oriented) {
        bool forward = request.edges.count(e) > 0;
        bool backward = request.edges.count({e.second, e.first}) > 0;
        if (!forward && !backward) throw ValidationError("oriented edge " + edge_name(e) + " is not a request edge");
        if (order.has_edge(e) || order.has_edge({e.second, e.first}))
            throw ValidationError("request edge " + edge_name(e) + " oriented twice");
        order.add_edge(e.first, e.second, !forward);
    }
    if (order.edges().size() != request.edges.size())
        throw ValidationError("orientation does not cover every request edge");
    validate_order(order);
    return order;
}

ExtractionOrder orient_bfs(const RequestGraph& request, const NodeId& root) {
    if (!request.nodes.count(root)) throw ValidationError("root " + root + " is not a request node");
    std::map<NodeId, std::size_t> layer{{root, 0}};
    std::deque<NodeId> todo{root};
    while (!todo.empty()) {
        auto i = todo.front();
        todo.pop_front();
        for (const auto& j : request.neighbors(i))
            if (layer.emplace(j, layer[i] + 1).second) todo.push_back(j);
    }
    if (layer.size() != request.nodes.size()) throw ValidationError("request is not connected");
    std::vector<Edge> oriented;
    for (const auto& [t, h] : request.edges) {
        auto key_t = std::make_pair(layer.at(t), t);
        auto key_h = std::make_pair(layer.at(h), h);
        oriented.push_back(key_t < key_h ? Edge{t, h} : Edge{h, t});
    }
    return make_order(request, root, oriented);
}

// --------------------------------------------------------- confluence labels

namespace {

/// Unit-capacity max flow on a node-split DAG, specialised to the question
/// "does edge (a,b) lie on a confluence from s to j?".
class ConfluenceProbe {
public:
    explicit ConfluenceProbe(const OrientedGraph& g) : g_(g) {
        for (const auto& i : g.nodes()) index_.emplace(i, static_cast<int>(index_.size()));
    }

    bool lies_on_confluence(const Edge& e, const NodeId& s, const NodeId& j) {
        const NodeId& a = e.first;
        const NodeId& b = e.second;
        const int n = static_cast<int>(index_.size());
        // Vertices: v_in = 2v, v_out = 2v+1, source 2n, sink 2n+1.
        reset(2 * n + 2);
        const int src = 2 * n;
        const int snk = 2 * n + 1;
        auto in = [&](const NodeId& v) { return 2 * index_.at(v); };
        auto out = [&](const NodeId& v) { return 2 * index_.at(v) + 1; };
        for (const auto& v : g_.nodes())
            if (v != a && v != b) add_arc(in(v), out(v), 1);
        for (const auto& [edge, rev] : g_.edges())
            if (edge != e) add_arc(out(edge.first), in(edge.second), 1);
        int supply = 0;
        // Start: one path to j, plus one to a when the confluence does not start at a.
        int from_s = s == a ? 1 : 2;
        add_arc(src, out(s), from_s);
        supply += from_s;
        if (s != a) add_arc(in(a), snk, 1);
        int into_j = 1;
        if (b != j) {
            add_arc(src, out(b), 1);
            supply += 1;
            into_j = 2;
        }
        add_arc(in(j), snk, into_j);
        return max_flow(src, snk) == supply;
    }

private:
    struct Arc {
        int to;
        int cap;
    };

    void reset(int vertices) {
        arcs_.clear();
        adj_.assign(vertices, {});
    }

    void add_arc(int u, int v, int cap) {
        adj_[u].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({v, cap});
        adj_[v].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({u, 0});
    }

    int max_flow(int s, int t) {
        int flow = 0;
        std::vector<int> via(adj_.size());
        while (true) {
            std::fill(via.begin(), via.end(), -1);
            std::queue<int> q;
            q.push(s);
            via[s] = -2;
            while (!q.empty() && via[t] == -1) {
                int u = q.front();
                q.pop();
                for (int id : adj_[u])
                    if (arcs_[id].cap > 0 && via[arcs_[id].to] == -1) {
                        via[arcs_[id].to] = id;
                        q.push(arcs_[id].to);
                    }
            }
            if (via[t] == -1) return flow;
            for (int v = t; v != s; v = arcs_[via[v] ^ 1].to) {
                arcs_[via[v]].cap -= 1;
                arcs_[via[v] ^ 1].cap += 1;
            }
            ++flow;
        }
    }

    const OrientedGraph& g_;
    std::map<NodeId, int> index_;
    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> adj_;
};

}  // namespace

EdgeLabelAssignment confluence_edge_labels(const OrientedGraph& g) {
    EdgeLabelAssignment labels;
    for (const auto& [e, rev] : g.edges()) labels[e];
    ConfluenceProbe probe(g);
    for (const auto& j : g.nodes()) {
        if (g.in_edges(j).size() < 2) continue;
        const auto reaches_j = g.ancestors_of(j);
        for (const auto& [e, rev] : g.edges()) {
            if (!reaches_j.count(e.second) || e.first == j) continue;
            for (const auto& s : g.ancestors_of(e.first)) {
                if (probe.lies_on_confluence(e, s, j)) {
                    labels[e].insert(j);
                    break;
                }
            }
        }
    }
    return labels;
}

// -------------------------------------------------------------- validation

bool LabelReport::passed() const {
    return path_continuity && std::all_of(property.begin(), property.end(), [](bool b) { return b; });
}

LabelSubgraph label_induced_subgraph(const OrientedGraph& g, const EdgeLabelAssignment& labels, const NodeId& k) {
    LabelSubgraph sub;
    for (const auto& [e, ls] : labels)
        if (ls.count(k) && g.has_edge(e)) {
            sub.edges.insert(e);
            sub.nodes.insert(e.first);
            sub.nodes.insert(e.second);
        }
    if (sub.edges.empty()) throw ValidationError("node " + k + " never occurs as a label");
    OrientedGraph h = g.edge_subgraph(sub.edges);
    auto srcs = h.sources();
    if (srcs.size() == 1 && h.reachable_from(srcs.front()).size() == h.nodes().size()) sub.root = srcs.front();
    return sub;
}

LabelReport check_decomposable_labels(const OrientedGraph& g, const EdgeLabelAssignment& labels) {
    LabelReport rep;
    auto fail = [&](int property, std::string msg) {
        if (property > 0)
            rep.property[property - 1] = false;
        else
            rep.path_continuity = false;
        rep.messages.push_back(std::move(msg));
    };
    auto label_of = [&](const Edge& e) -> const LabelSet& {
        static const LabelSet empty;
        auto it = labels.find(e);
        return it == labels.end() ? empty : it->second;
    };

    const auto confluence = confluence_edge_labels(g);
    for (const auto& [e, ls] : confluence)
        for (const auto& k : ls)
            if (!label_of(e).count(k))
                fail(1, "edge " + edge_name(e) + " lacks confluence label " + k);

    std::set<NodeId> all_labels;
    for (const auto& [e, ls] : labels) {
        if (!g.has_edge(e)) continue;
        all_labels.insert(ls.begin(), ls.end());
        if (ls.count(e.first)) fail(5, "out-edge " + edge_name(e) + " of " + e.first + " is labeled with it");
    }
    for (const auto& k : all_labels) {
        auto sub = label_induced_subgraph(g, labels, k);
        OrientedGraph h = g.edge_subgraph(sub.edges);
        if (!sub.root) fail(2, "label-induced subgraph of " + k + " is not connected and rooted");
        if (!sub.nodes.count(k)) fail(3, "label-induced subgraph of " + k + " does not contain " + k);
        if (sub.root && sub.nodes.count(k)) {
            auto from_root = g.reachable_from(*sub.root);
            auto to_k = g.ancestors_of(k);
            for (const auto& [e, rev] : g.edges())
                if (from_root.count(e.first) && to_k.count(e.second) && !label_of(e).count(k))
                    fail(0, "edge " + edge_name(e) + " on a path from " + *sub.root + " to " + k +
                                " is not labeled " + k);
        }
    }
    for (const auto& i : g.nodes()) {
        const auto& in = g.in_edges(i);
        for (std::size_t x = 1; x < in.size(); ++x)
            if (label_of(in[x]) != label_of(in[0])) {
                fail(4, "in-edges " + edge_name(in[0]) + " and " + edge_name(in[x]) + " carry different labels");
                break;
            }
    }
    return rep;
}

// --------------------------------------------------------------------- JSON

json order_to_json(const ExtractionOrder& order, const EdgeLabelAssignment* labels) {
    json edges = json::array();
    for (const auto& [e, rev] : order.edges()) {
        json item = {{"tail", e.first}, {"head", e.second}, {"reversed", rev}};
        if (labels) {
            json ls = json::array();
            if (auto it = labels->find(e); it != labels->end())
                for (const auto& k : it->second) ls.push_back(k);
            item["labels"] = ls;
        }
        edges.push_back(std::move(item));
    }
    return {{"root", order.root}, {"edges", edges}};
}

ExtractionOrder order_from_json(const json& doc, const RequestGraph& request) {
    if (!doc.is_object() || !doc.contains("root") || !doc.contains("edges") || !doc.at("edges").is_array())
        throw ParseError("extraction order must be an object with \"root\" and \"edges\"");
    std::vector<Edge> oriented;
    for (const auto& item : doc.at("edges")) {
        if (!item.contains("tail") || !item.contains("head"))
            throw ParseError("extraction order edge needs \"tail\" and \"head\"");
        Edge e{item.at("tail").get<std::string>(), item.at("head").get<std::string>()};
        if (item.contains("reversed")) {
            bool rev = item.at("reversed").get<bool>();
            if (rev != (request.edges.count(e) == 0))
                throw ValidationError("reversed flag of " + edge_name(e) + " disagrees with the request");
        }
        oriented.push_back(e);
    }
    return make_order(request, doc.at("root").get<std::string>(), oriented);
}

}  // namespace vnep
