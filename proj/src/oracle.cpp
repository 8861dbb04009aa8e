/**
 * @file oracle.cpp
 * @brief Exhaustive enumeration and branch-and-bound search over mappings.
 */
#include "vnep/oracle.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "vnep/error.hpp"

namespace vnep {

std::vector<Path> simple_paths(const SubstrateGraph& substrate, const NodeId& from, const NodeId& to,
                               std::size_t max_hops) {
    if (from == to) return {Path{}};
    std::vector<Path> out;
    Path current;
    std::set<NodeId> on_path{from};
    std::function<void(const NodeId&)> extend = [&](const NodeId& u) {
        if (current.size() == max_hops) return;
        for (const auto& v : substrate.successors(u)) {
            if (on_path.count(v)) continue;
            current.push_back({u, v});
            if (v == to)
                out.push_back(current);
            else {
                on_path.insert(v);
                extend(v);
                on_path.erase(v);
            }
            current.pop_back();
        }
    };
    extend(from);
    return out;
}

namespace {

/// Shared search context: node hosts, cached path lists and budget counters.
class Search {
public:
    Search(const Instance& inst, const OracleBudget& budget) : inst_(inst), budget_(budget) {
        // A request type without any host admits no mapping at all; every
        // other defect is an input error.
        for (const auto& [i, t] : inst.request.node_type)
            if (inst.substrate.nodes_supporting(t).empty()) hostless_ = true;
        if (hostless_) return;
        validate_instance(inst);
        nodes_.assign(inst.request.nodes.begin(), inst.request.nodes.end());
        edges_.assign(inst.request.edges.begin(), inst.request.edges.end());
        double combinations = 1.0;
        for (const auto& i : nodes_) {
            hosts_[i] = inst.substrate.nodes_supporting(inst.request.node_type.at(i));
            combinations *= static_cast<double>(hosts_[i].size());
        }
        if (combinations > static_cast<double>(budget.max_node_maps))
            throw BudgetExceeded("oracle: " + std::to_string(combinations) + " node maps exceed the budget");
    }

    const std::vector<Path>& paths(const NodeId& u, const NodeId& v) {
        auto key = std::make_pair(u, v);
        auto it = paths_.find(key);
        if (it == paths_.end()) it = paths_.emplace(key, simple_paths(inst_.substrate, u, v, budget_.max_path_hops)).first;
        return it->second;
    }

    void tick() {
        if (++work_ > budget_.max_mappings) throw BudgetExceeded("oracle: search exceeds the mapping budget");
    }

    const Instance& inst_;
    const OracleBudget& budget_;
    std::vector<NodeId> nodes_;
    std::vector<Edge> edges_;
    std::map<NodeId, std::vector<NodeId>> hosts_;
    std::map<std::pair<NodeId, NodeId>, std::vector<Path>> paths_;
    std::size_t work_ = 0;
    bool hostless_ = false;
};

}  // namespace

std::vector<EnumeratedMapping> enumerate_valid_mappings(const Instance& instance, const OracleBudget& budget) {
    Search search(instance, budget);
    std::vector<EnumeratedMapping> out;
    if (search.hostless_) return out;
    Mapping m;
    std::function<void(std::size_t)> map_edges = [&](std::size_t k) {
        if (k == search.edges_.size()) {
            search.tick();
            out.push_back({m, respects_capacities(instance, m)});
            return;
        }
        const Edge& e = search.edges_[k];
        for (const auto& p : search.paths(m.node_map.at(e.first), m.node_map.at(e.second))) {
            m.edge_map[e] = p;
            map_edges(k + 1);
        }
        m.edge_map.erase(e);
    };
    std::function<void(std::size_t)> map_nodes = [&](std::size_t k) {
        if (k == search.nodes_.size()) {
            map_edges(0);
            return;
        }
        const NodeId& i = search.nodes_[k];
        for (const auto& u : search.hosts_.at(i)) {
            m.node_map[i] = u;
            map_nodes(k + 1);
        }
        m.node_map.erase(i);
    };
    map_nodes(0);
    return out;
}

std::optional<OracleResult> oracle_best(const Instance& instance, const OracleBudget& budget) {
    Search search(instance, budget);
    if (search.hostless_) return std::nullopt;
    const auto& req = instance.request;
    constexpr double kTol = 1e-9;
    std::map<Resource, double> load;
    std::optional<OracleResult> best;
    Mapping m;
    double cost = 0.0;

    auto fits = [&](const Resource& r, double amount) {
        return load[r] + amount <= instance.capacity(r) + kTol;
    };
    // Cheapest conceivable completion of the nodes from position k on.
    std::vector<double> node_bound(search.nodes_.size() + 1, 0.0);
    for (std::size_t k = search.nodes_.size(); k-- > 0;) {
        const NodeId& i = search.nodes_[k];
        double cheapest = std::numeric_limits<double>::infinity();
        for (const auto& u : search.hosts_.at(i))
            cheapest = std::min(cheapest, req.node_demand.at(i) * instance.cost(Resource::of_node(u, req.node_type.at(i))));
        node_bound[k] = node_bound[k + 1] + cheapest;
    }
    auto path_cost = [&](const Edge& e, const Path& p) {
        double c = 0.0;
        for (const auto& arc : p) c += req.edge_demand.at(e) * instance.cost(Resource::of_edge(arc));
        return c;
    };

    std::function<void(std::size_t)> map_edges = [&](std::size_t k) {
        search.tick();
        if (best && cost >= best->cost - kTol) return;
        if (k == search.edges_.size()) {
            best = OracleResult{m, cost};
            return;
        }
        const Edge& e = search.edges_[k];
        const double d = req.edge_demand.at(e);
        for (const auto& p : search.paths(m.node_map.at(e.first), m.node_map.at(e.second))) {
            if (!std::all_of(p.begin(), p.end(), [&](const Edge& arc) { return fits(Resource::of_edge(arc), d); }))
                continue;
            const double c = path_cost(e, p);
            for (const auto& arc : p) load[Resource::of_edge(arc)] += d;
            cost += c;
            m.edge_map[e] = p;
            map_edges(k + 1);
            m.edge_map.erase(e);
            cost -= c;
            for (const auto& arc : p) load[Resource::of_edge(arc)] -= d;
        }
    };
    std::function<void(std::size_t)> map_nodes = [&](std::size_t k) {
        search.tick();
        if (best && cost + node_bound[k] >= best->cost - kTol) return;
        if (k == search.nodes_.size()) {
            map_edges(0);
            return;
        }
        const NodeId& i = search.nodes_[k];
        const double d = req.node_demand.at(i);
        for (const auto& u : search.hosts_.at(i)) {
            const Resource r = Resource::of_node(u, req.node_type.at(i));
            if (!fits(r, d)) continue;
            const double c = d * instance.cost(r);
            load[r] += d;
            cost += c;
            m.node_map[i] = u;
            map_nodes(k + 1);
            m.node_map.erase(i);
            cost -= c;
            load[r] -= d;
        }
    };
    map_nodes(0);
    return best;
}

}  // namespace vnep
