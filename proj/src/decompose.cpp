/**
 * @file decompose.cpp
 * @brief Path extraction, the rooted decomposition engine shared by the MCF
 *        and adapted formulations, the naive follower and verification.
 */
#include "vnep/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "vnep/error.hpp"

namespace vnep {

ExtractedPath extract_path(const SubstrateGraph& substrate, const FlowView& view, const NodeId& start, bool reversed,
                           double epsilon) {
    if (view.far_endpoint(start) > epsilon) return {{}, start};
    std::map<NodeId, NodeId> parent;
    std::set<NodeId> visited{start};
    std::deque<NodeId> queue{start};
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        const auto next = reversed ? substrate.predecessors(u) : substrate.successors(u);
        for (const auto& v : next) {
            if (visited.count(v)) continue;
            const Edge arc = reversed ? Edge{v, u} : Edge{u, v};
            if (view.flow(arc) <= epsilon) continue;
            visited.insert(v);
            parent[v] = u;
            if (view.far_endpoint(v) > epsilon) {
                Path path;
                for (NodeId w = v; w != start; w = parent.at(w))
                    path.push_back(reversed ? Edge{w, parent.at(w)} : Edge{parent.at(w), w});
                if (!reversed) std::reverse(path.begin(), path.end());
                return {path, v};
            }
            queue.push_back(v);
        }
    }
    throw InvariantError("no admissible path from substrate node " + start);
}

namespace {

/// One decomposition run; owns a private copy of the solution values.
class Engine {
public:
    Engine(const Instance& inst, const OrientedGraph& graph, const NodeId& root, const EdgeLabelAssignment& labels,
           const LabelSetOrdering* omega, const Assignment& solution, const DecomposeOptions& options)
        : inst_(inst), graph_(graph), root_(root), labels_(labels), omega_(omega), opt_(options) {
        for (const auto& [name, v] : solution) values_.emplace(name, v);
        if (!graph.has_node(root)) throw ValidationError("root " + root + " is not part of the order");
    }

    ConvexCombination run() {
        ConvexCombination out;
        std::map<Mapping, std::size_t> position;
        double remaining = 1.0;
        const auto root_hosts = inst_.substrate.nodes_supporting(inst_.request.node_type.at(root_));
        while (remaining > opt_.epsilon) {
            std::optional<NodeId> start;
            double best = opt_.epsilon;
            for (const auto& u : root_hosts)
                if (double v = value(VariableKey::node(root_, u).str()); v > best) {
                    best = v;
                    start = u;
                }
            if (!start) {
                if (remaining > 1e-6)
                    throw InvariantError("root " + root_ + " has no remaining mapping while " +
                                         std::to_string(remaining) + " of the solution is undecomposed");
                break;
            }
            Mapping m = extract_one(*start);
            double f = std::numeric_limits<double>::infinity();
            for (const auto& name : used_) f = std::min(f, value(name));
            for (const auto& name : used_) {
                double& v = values_[name];
                v -= f;
                if (v < opt_.epsilon) v = 0.0;
            }
            // Scoped runs extract partial mappings whose allocations are not
            // defined on their own; the allocation bookkeeping is skipped there.
            if (opt_.scope.empty())
                for (const auto& [r, amount] : allocations(inst_, m))
                    values_[VariableKey::allocation(r).str()] -= f * amount;
            remaining -= f;
            auto [it, fresh] = position.emplace(m, out.entries.size());
            if (fresh)
                out.entries.push_back({f, std::move(m)});
            else
                out.entries[it->second].value += f;
        }
        return out;
    }

private:
    bool mcf() const { return omega_ == nullptr; }

    double value(const std::string& name) const {
        auto it = values_.find(name);
        return it == values_.end() ? 0.0 : it->second;
    }

    const std::vector<LabelMapping>& space(const LabelSet& s) {
        auto it = spaces_.find(s);
        if (it == spaces_.end()) it = spaces_.emplace(s, mapping_space(inst_, s)).first;
        return it->second;
    }

    const LabelSet& labels_of(const Edge& e) const {
        static const LabelSet empty;
        auto it = labels_.find(e);
        return it == labels_.end() ? empty : it->second;
    }

    std::string endpoint_name(const NodeId& i, const NodeId& u, const Edge& orig, const LabelMapping& m) const {
        return mcf() ? VariableKey::node(i, u).str() : VariableKey::sub_node(i, u, orig, m).str();
    }

    std::string flow_name(const Edge& orig, const Edge& arc, const LabelMapping& m) const {
        return mcf() ? VariableKey::flow(orig, arc).str() : VariableKey::sub_flow(orig, arc, m).str();
    }

    void assign(const NodeId& k, const NodeId& u) {
        auto [it, fresh] = assigned_.emplace(k, u);
        if (!fresh && it->second != u)
            throw InvariantError("request node " + k + " mapped to both " + it->second + " and " + u);
    }

    Mapping extract_one(const NodeId& start) {
        assigned_.clear();
        used_.clear();
        Mapping m;
        std::map<NodeId, std::size_t> mapped_in;
        std::deque<NodeId> queue{root_};
        assign(root_, start);
        used_.insert(VariableKey::node(root_, start).str());
        while (!queue.empty()) {
            const NodeId i = queue.front();
            queue.pop_front();
            const NodeId u = assigned_.at(i);
            const auto& out = graph_.out_edges(i);
            const std::size_t layers = mcf() ? 1 : omega_->at(i).sets.size();
            for (std::size_t a = 0; a < layers; ++a) {
                if (!mcf()) choose_label_mapping(i, u, a);
                for (const auto& e : out) {
                    const std::size_t rep = mcf() ? 0 : omega_->at(i).representative.at(e);
                    if (rep != a) continue;
                    map_edge(e, m);
                    const NodeId& j = e.second;
                    if (++mapped_in[j] == graph_.in_edges(j).size()) {
                        used_.insert(VariableKey::node(j, assigned_.at(j)).str());
                        queue.push_back(j);
                    }
                }
            }
        }
        for (const auto& i : graph_.nodes()) {
            auto it = assigned_.find(i);
            if (it == assigned_.end() || (i != root_ && mapped_in[i] != graph_.in_edges(i).size()))
                throw InvariantError("request node " + i + " was not reached by the decomposition");
            m.node_map.emplace(i, it->second);
        }
        return m;
    }

    /// Picks the largest compatible γ of layer @p a at (i, u) and fixes the
    /// labels it maps.
    void choose_label_mapping(const NodeId& i, const NodeId& u, std::size_t a) {
        const LabelSet& set = omega_->at(i).sets[a];
        const LabelMapping* chosen = nullptr;
        std::string chosen_name;
        double best = opt_.epsilon;
        for (const auto& alpha : space(set)) {
            bool compatible = std::all_of(alpha.begin(), alpha.end(), [&](const auto& kv) {
                auto it = assigned_.find(kv.first);
                return it == assigned_.end() || it->second == kv.second;
            });
            if (!compatible) continue;
            auto name = VariableKey::gamma(i, u, a, alpha, opt_.scope).str();
            if (double v = value(name); v > best) {
                best = v;
                chosen = &alpha;
                chosen_name = std::move(name);
            }
        }
        if (!chosen)
            throw InvariantError("no compatible label mapping for node " + i + " at " + u + " and label set " +
                                 label_set_name(set));
        for (const auto& [k, w] : *chosen) assign(k, w);
        used_.insert(chosen_name);
    }

    void map_edge(const Edge& e, Mapping& m) {
        const Edge orig = graph_.original(e);
        const bool reversed = graph_.is_reversed(e);
        const LabelSet& le = labels_of(e);
        const LabelMapping me = restrict_mapping(LabelMapping(assigned_.begin(), assigned_.end()), le);
        if (me.size() != le.size())
            throw InvariantError("labels of " + edge_name(e) + " are not fixed when the edge is mapped");
        const NodeId& i = e.first;
        const NodeId& j = e.second;
        const NodeId u = assigned_.at(i);
        const auto near = endpoint_name(i, u, orig, me);
        if (value(near) <= opt_.epsilon)
            throw InvariantError("subformulation of " + edge_name(orig) + " carries no flow for " + i + " at " + u);
        used_.insert(near);
        const auto fixed = assigned_.find(j);
        const std::optional<NodeId> target =
            fixed == assigned_.end() ? std::nullopt : std::optional<NodeId>(fixed->second);
        FlowView view{[&](const Edge& arc) { return value(flow_name(orig, arc, me)); },
                      [&](const NodeId& w) {
                          if (target && *target != w) return 0.0;
                          return value(endpoint_name(j, w, orig, me));
                      }};
        auto found = extract_path(inst_.substrate, view, u, reversed, opt_.epsilon);
        for (const auto& arc : found.path) used_.insert(flow_name(orig, arc, me));
        used_.insert(endpoint_name(j, found.end, orig, me));
        assign(j, found.end);
        m.edge_map[orig] = std::move(found.path);
    }

    const Instance& inst_;
    const OrientedGraph& graph_;
    NodeId root_;
    const EdgeLabelAssignment& labels_;
    const LabelSetOrdering* omega_;
    DecomposeOptions opt_;
    std::unordered_map<std::string, double> values_;
    std::map<LabelSet, std::vector<LabelMapping>> spaces_;
    std::map<NodeId, NodeId> assigned_;
    std::set<std::string> used_;
};

}  // namespace

ConvexCombination decompose_mcf_tree(const Instance& instance, const ExtractionOrder& order,
                                     const Assignment& solution, const DecomposeOptions& options) {
    if (!instance.request.is_tree()) throw ValidationError("MCF decomposition requires a tree request");
    validate_order(order);
    static const EdgeLabelAssignment no_labels;
    return Engine(instance, order, order.root, no_labels, nullptr, solution, options).run();
}

ConvexCombination decompose_rip(const Instance& instance, const OrientedGraph& graph, const NodeId& root,
                                const EdgeLabelAssignment& labels, const LabelSetOrdering& omega,
                                const Assignment& solution, const DecomposeOptions& options) {
    return Engine(instance, graph, root, labels, &omega, solution, options).run();
}

ConvexCombination decompose_rip(const Instance& instance, const ExtractionOrder& order,
                                const EdgeLabelAssignment& labels, const LabelSetOrdering& omega,
                                const Assignment& solution, const DecomposeOptions& options) {
    validate_order(order);
    return decompose_rip(instance, order, order.root, labels, omega, solution, options);
}

NaiveTrace trace_naive(const Instance& instance, const ExtractionOrder& order, const Assignment& solution,
                       double epsilon) {
    validate_order(order);
    auto value = [&](const std::string& name) {
        auto it = solution.find(name);
        return it == solution.end() ? 0.0 : it->second;
    };
    NaiveTrace trace;
    auto& node_map = trace.mapping.node_map;
    std::optional<NodeId> start;
    double best = epsilon;
    for (const auto& u : instance.substrate.nodes_supporting(instance.request.node_type.at(order.root)))
        if (double v = value(VariableKey::node(order.root, u).str()); v > best) {
            best = v;
            start = u;
        }
    if (!start) throw InvariantError("root " + order.root + " carries no mapping");
    node_map[order.root] = *start;
    for (const auto& i : order.topological_order()) {
        auto image = node_map.find(i);
        if (image == node_map.end()) continue;
        for (const auto& e : order.out_edges(i)) {
            const Edge orig = order.original(e);
            const NodeId& j = e.second;
            FlowView view{[&](const Edge& arc) { return value(VariableKey::flow(orig, arc).str()); },
                          [&](const NodeId& w) { return value(VariableKey::node(j, w).str()); }};
            auto found = extract_path(instance.substrate, view, image->second, order.is_reversed(e), epsilon);
            trace.mapping.edge_map[orig] = found.path;
            auto [it, fresh] = node_map.emplace(j, found.end);
            if (!fresh && it->second != found.end)
                trace.conflicts.push_back(j + ": reached at " + it->second + " and at " + found.end);
        }
    }
    return trace;
}

VerificationReport verify_convex_combination(const Instance& instance, const ConvexCombination& d,
                                             const Assignment* solution, double tolerance) {
    VerificationReport rep;
    const double total = d.total();
    if (std::abs(total - 1.0) > tolerance) rep.failures.push_back("incomplete: values sum to " + std::to_string(total));
    std::map<Resource, double> used;
    for (std::size_t k = 0; k < d.entries.size(); ++k) {
        const auto& entry = d.entries[k];
        if (!(entry.value > 0.0)) rep.failures.push_back("entry " + std::to_string(k) + " has a nonpositive value");
        auto check = validate_mapping(instance, entry.mapping);
        if (!check.valid) {
            rep.failures.push_back("entry " + std::to_string(k) + " is invalid: " + check.violations.front());
            continue;
        }
        for (const auto& [r, amount] : allocations(instance, entry.mapping)) used[r] += entry.value * amount;
    }
    if (solution)
        for (const auto& [r, amount] : used) {
            auto it = solution->find(VariableKey::allocation(r).str());
            const double bound = it == solution->end() ? 0.0 : it->second;
            if (amount > bound + tolerance)
                rep.failures.push_back("allocation of " + r.name() + " exceeds its variable: " + std::to_string(amount) +
                                       " > " + std::to_string(bound));
        }
    return rep;
}

std::optional<CombinationEntry> best_entry(const Instance& instance, const ConvexCombination& d) {
    std::optional<CombinationEntry> best;
    double best_cost = 0.0;
    for (const auto& entry : d.entries) {
        const double c = mapping_cost(instance, entry.mapping);
        if (!best || c < best_cost) {
            best = entry;
            best_cost = c;
        }
    }
    return best;
}

}  // namespace vnep
