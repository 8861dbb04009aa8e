/**
 * @file instance.cpp
 * @brief Instance model, JSON I/O, mapping validation and allocations.
 */
#include "vnep/instance.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

#include "vnep/error.hpp"

namespace vnep {

using nlohmann::json;

std::string edge_name(const Edge& e) { return e.first + "->" + e.second; }

void check_identifier(std::string_view id, std::string_view what) {
    if (id.empty()) throw ValidationError(std::string(what) + ": empty identifier");
    static constexpr std::string_view reserved = "@|:,[]. \t\n\r>=";
    if (id.find_first_of(reserved) != std::string_view::npos)
        throw ValidationError(std::string(what) + " '" + std::string(id) +
                              "' contains a reserved character (one of @|:,[]. >= or whitespace)");
}

// ---------------------------------------------------------------- substrate

std::set<TypeId> SubstrateGraph::types() const {
    std::set<TypeId> out;
    for (const auto& [u, ts] : supported_types) out.insert(ts.begin(), ts.end());
    return out;
}

bool SubstrateGraph::supports(const NodeId& u, const TypeId& type) const {
    auto it = supported_types.find(u);
    return it != supported_types.end() && it->second.count(type) > 0;
}

std::vector<NodeId> SubstrateGraph::nodes_supporting(const TypeId& type) const {
    std::vector<NodeId> out;
    for (const auto& u : nodes)
        if (supports(u, type)) out.push_back(u);
    return out;
}

std::vector<NodeId> SubstrateGraph::successors(const NodeId& u) const {
    std::vector<NodeId> out;
    for (auto it = edges.lower_bound({u, std::string()}); it != edges.end() && it->first == u; ++it)
        out.push_back(it->second);
    return out;
}

std::vector<NodeId> SubstrateGraph::predecessors(const NodeId& u) const {
    std::vector<NodeId> out;
    for (const auto& [t, h] : edges)
        if (h == u) out.push_back(t);
    return out;
}

// ------------------------------------------------------------------ request

std::vector<NodeId> RequestGraph::neighbors(const NodeId& i) const {
    std::vector<NodeId> out;
    for (const auto& [t, h] : edges) {
        if (t == i) out.push_back(h);
        if (h == i) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool RequestGraph::is_connected() const {
    if (nodes.empty()) return true;
    std::set<NodeId> seen{*nodes.begin()};
    std::queue<NodeId> todo;
    todo.push(*nodes.begin());
    while (!todo.empty()) {
        auto i = todo.front();
        todo.pop();
        for (const auto& j : neighbors(i))
            if (seen.insert(j).second) todo.push(j);
    }
    return seen.size() == nodes.size();
}

bool RequestGraph::is_tree() const { return is_connected() && edges.size() + 1 == nodes.size(); }

// ----------------------------------------------------------------- resource

std::string Resource::name() const {
    return kind == Kind::Node ? node + "." + detail : node + "->" + detail;
}

double Instance::cost(const Resource& r) const {
    auto it = unit_cost.find(r);
    return it == unit_cost.end() ? 1.0 : it->second;
}

double Instance::capacity(const Resource& r) const {
    if (r.kind == Resource::Kind::Node) {
        auto it = substrate.node_capacity.find({r.node, r.detail});
        return it == substrate.node_capacity.end() ? 0.0 : it->second;
    }
    auto it = substrate.edge_capacity.find(r.edge());
    return it == substrate.edge_capacity.end() ? 0.0 : it->second;
}

std::vector<Resource> Instance::resources() const {
    std::vector<Resource> out;
    for (const auto& [key, cap] : substrate.node_capacity) out.push_back(Resource::of_node(key.first, key.second));
    for (const auto& e : substrate.edges) out.push_back(Resource::of_edge(e));
    return out;
}

// --------------------------------------------------------------- validation

void validate_instance(const Instance& instance) {
    const auto& s = instance.substrate;
    const auto& r = instance.request;
    for (const auto& u : s.nodes) check_identifier(u, "substrate node");
    for (const auto& [u, ts] : s.supported_types) {
        if (!s.nodes.count(u)) throw ValidationError("types given for unknown substrate node " + u);
        for (const auto& t : ts) check_identifier(t, "type");
    }
    for (const auto& [key, cap] : s.node_capacity) {
        if (!s.supports(key.first, key.second))
            throw ValidationError("capacity for unsupported type " + key.second + " at node " + key.first);
        if (!(cap > 0.0))
            throw ValidationError("nonpositive capacity for " + key.first + "." + key.second);
    }
    for (const auto& u : s.nodes) {
        auto it = s.supported_types.find(u);
        if (it == s.supported_types.end()) continue;
        for (const auto& t : it->second)
            if (!s.node_capacity.count({u, t}))
                throw ValidationError("missing capacity for " + u + "." + t);
    }
    for (const auto& e : s.edges) {
        if (!s.nodes.count(e.first) || !s.nodes.count(e.second))
            throw ValidationError("substrate edge " + edge_name(e) + " references an unknown node");
        if (e.first == e.second) throw ValidationError("loop edge " + edge_name(e) + " in substrate");
        auto it = s.edge_capacity.find(e);
        if (it == s.edge_capacity.end() || !(it->second > 0.0))
            throw ValidationError("nonpositive capacity for substrate edge " + edge_name(e));
    }

    if (r.nodes.empty()) throw ValidationError("request has no nodes");
    const auto types = s.types();
    for (const auto& i : r.nodes) {
        check_identifier(i, "request node");
        auto t = r.node_type.find(i);
        if (t == r.node_type.end()) throw ValidationError("request node " + i + " has no type");
        if (!types.count(t->second))
            throw ValidationError("unknown type " + t->second + " referenced by request node " + i);
        auto d = r.node_demand.find(i);
        if (d == r.node_demand.end() || !(d->second >= 0.0))
            throw ValidationError("request node " + i + " has a missing or negative demand");
    }
    for (const auto& e : r.edges) {
        if (!r.nodes.count(e.first) || !r.nodes.count(e.second))
            throw ValidationError("request edge " + edge_name(e) + " references an unknown node");
        if (e.first == e.second) throw ValidationError("loop edge " + edge_name(e) + " in request");
        if (r.edges.count({e.second, e.first}))
            throw ValidationError("antiparallel request edges " + edge_name(e) + " and " +
                                  edge_name({e.second, e.first}));
        auto d = r.edge_demand.find(e);
        if (d == r.edge_demand.end() || !(d->second >= 0.0))
            throw ValidationError("request edge " + edge_name(e) + " has a missing or negative demand");
    }
    if (!r.is_connected()) throw ValidationError("request is not connected");
    for (const auto& [res, c] : instance.unit_cost) {
        if (!(c >= 0.0)) throw ValidationError("negative cost for " + res.name());
        bool known = res.kind == Resource::Kind::Node ? s.node_capacity.count({res.node, res.detail}) > 0
                                                      : s.edges.count(res.edge()) > 0;
        if (!known) throw ValidationError("cost given for unknown resource " + res.name());
    }
}

// --------------------------------------------------------------------- JSON

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing field \"" + key + "\"");
    return *it;
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
    const auto& v = field(obj, key, where);
    if (!v.is_string()) throw ParseError(where + ": field \"" + key + "\" must be a string");
    return v.get<std::string>();
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError(where + ": expected a number");
    return v.get<double>();
}

const json& array_field(const json& obj, const char* key, const std::string& where) {
    const auto& v = field(obj, key, where);
    if (!v.is_array()) throw ParseError(where + ": field \"" + key + "\" must be an array");
    return v;
}

}  // namespace

Instance load_instance(const json& doc) {
    Instance inst;
    auto& s = inst.substrate;
    auto& r = inst.request;

    const auto& sub = field(doc, "substrate", "document");
    for (const auto& n : array_field(sub, "nodes", "substrate")) {
        auto id = string_field(n, "id", "substrate node");
        if (!s.nodes.insert(id).second) throw ValidationError("duplicate substrate node " + id);
        auto& ts = s.supported_types[id];
        for (const auto& t : array_field(n, "types", "substrate node " + id)) {
            if (!t.is_string()) throw ParseError("substrate node " + id + ": types must be strings");
            ts.insert(t.get<std::string>());
        }
        if (n.contains("capacity")) {
            const auto& caps = n.at("capacity");
            if (!caps.is_object()) throw ParseError("substrate node " + id + ": capacity must be an object");
            for (const auto& [t, c] : caps.items())
                s.node_capacity[{id, t}] = number(c, "capacity of " + id + "." + t);
        }
    }
    for (const auto& e : array_field(sub, "edges", "substrate")) {
        Edge key{string_field(e, "tail", "substrate edge"), string_field(e, "head", "substrate edge")};
        if (!s.edges.insert(key).second) throw ValidationError("duplicate substrate edge " + edge_name(key));
        s.edge_capacity[key] = number(field(e, "capacity", "substrate edge " + edge_name(key)),
                                      "capacity of " + edge_name(key));
    }

    const auto& req = field(doc, "request", "document");
    for (const auto& n : array_field(req, "nodes", "request")) {
        auto id = string_field(n, "id", "request node");
        if (!r.nodes.insert(id).second) throw ValidationError("duplicate request node " + id);
        r.node_type[id] = string_field(n, "type", "request node " + id);
        r.node_demand[id] = number(field(n, "demand", "request node " + id), "demand of " + id);
    }
    for (const auto& e : array_field(req, "edges", "request")) {
        Edge key{string_field(e, "tail", "request edge"), string_field(e, "head", "request edge")};
        if (!r.edges.insert(key).second) throw ValidationError("duplicate request edge " + edge_name(key));
        r.edge_demand[key] = number(field(e, "demand", "request edge " + edge_name(key)),
                                    "demand of " + edge_name(key));
    }

    if (doc.contains("costs")) {
        const auto& costs = doc.at("costs");
        if (!costs.is_object()) throw ParseError("costs must be an object");
        if (costs.contains("node")) {
            for (const auto& [key, c] : costs.at("node").items()) {
                auto dot = key.find('.');
                if (dot == std::string::npos) throw ParseError("node cost key '" + key + "' is not <id>.<type>");
                inst.unit_cost[Resource::of_node(key.substr(0, dot), key.substr(dot + 1))] =
                    number(c, "cost " + key);
            }
        }
        if (costs.contains("edge")) {
            for (const auto& [key, c] : costs.at("edge").items()) {
                auto arrow = key.find("->");
                if (arrow == std::string::npos)
                    throw ParseError("edge cost key '" + key + "' is not <tail>-><head>");
                inst.unit_cost[Resource::of_edge({key.substr(0, arrow), key.substr(arrow + 2)})] =
                    number(c, "cost " + key);
            }
        }
    }
    validate_instance(inst);
    return inst;
}

Instance load_instance_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return load_instance(doc);
}

Instance load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return load_instance_text(buf.str());
}

json instance_to_json(const Instance& inst) {
    json sub_nodes = json::array();
    for (const auto& u : inst.substrate.nodes) {
        json types = json::array();
        json caps = json::object();
        auto it = inst.substrate.supported_types.find(u);
        if (it != inst.substrate.supported_types.end())
            for (const auto& t : it->second) {
                types.push_back(t);
                caps[t] = inst.capacity(Resource::of_node(u, t));
            }
        sub_nodes.push_back({{"id", u}, {"types", types}, {"capacity", caps}});
    }
    json sub_edges = json::array();
    for (const auto& e : inst.substrate.edges)
        sub_edges.push_back({{"tail", e.first}, {"head", e.second}, {"capacity", inst.substrate.edge_capacity.at(e)}});
    json req_nodes = json::array();
    for (const auto& i : inst.request.nodes)
        req_nodes.push_back(
            {{"id", i}, {"type", inst.request.node_type.at(i)}, {"demand", inst.request.node_demand.at(i)}});
    json req_edges = json::array();
    for (const auto& e : inst.request.edges)
        req_edges.push_back({{"tail", e.first}, {"head", e.second}, {"demand", inst.request.edge_demand.at(e)}});
    json doc = {{"substrate", {{"nodes", sub_nodes}, {"edges", sub_edges}}},
                {"request", {{"nodes", req_nodes}, {"edges", req_edges}}}};
    if (!inst.unit_cost.empty()) {
        json node_costs = json::object();
        json edge_costs = json::object();
        for (const auto& [res, c] : inst.unit_cost)
            (res.kind == Resource::Kind::Node ? node_costs : edge_costs)[res.name()] = c;
        doc["costs"] = {{"node", node_costs}, {"edge", edge_costs}};
    }
    return doc;
}

// ----------------------------------------------------------------- mappings

MappingReport validate_mapping(const Instance& inst, const Mapping& m) {
    MappingReport rep;
    auto fail = [&](std::string msg) {
        rep.valid = false;
        rep.violations.push_back(std::move(msg));
    };
    for (const auto& i : inst.request.nodes) {
        auto it = m.node_map.find(i);
        if (it == m.node_map.end()) {
            fail("unmapped node " + i);
            continue;
        }
        if (!inst.substrate.nodes.count(it->second))
            fail("node " + i + " mapped to unknown substrate node " + it->second);
        else if (!inst.substrate.supports(it->second, inst.request.node_type.at(i)))
            fail("node " + i + " mapped to " + it->second + " which does not support type " +
                 inst.request.node_type.at(i));
    }
    for (const auto& [i, u] : m.node_map)
        if (!inst.request.nodes.count(i)) fail("mapping of unknown request node " + i);
    for (const auto& e : inst.request.edges) {
        auto it = m.edge_map.find(e);
        if (it == m.edge_map.end()) {
            fail("unmapped edge " + edge_name(e));
            continue;
        }
        auto ti = m.node_map.find(e.first);
        auto hi = m.node_map.find(e.second);
        if (ti == m.node_map.end() || hi == m.node_map.end()) continue;
        const Path& p = it->second;
        if (p.empty()) {
            if (ti->second != hi->second) fail("path endpoint mismatch: empty path for " + edge_name(e));
            continue;
        }
        std::set<NodeId> visited{p.front().first};
        bool ok = true;
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (!inst.substrate.edges.count(p[k])) {
                fail("edge " + edge_name(e) + " uses unknown substrate edge " + edge_name(p[k]));
                ok = false;
                break;
            }
            if (k > 0 && p[k - 1].second != p[k].first) {
                fail("path of " + edge_name(e) + " is not contiguous");
                ok = false;
                break;
            }
            if (!visited.insert(p[k].second).second) {
                fail("path of " + edge_name(e) + " is not simple");
                ok = false;
                break;
            }
        }
        if (ok && (p.front().first != ti->second || p.back().second != hi->second))
            fail("path endpoint mismatch for " + edge_name(e));
    }
    for (const auto& [e, p] : m.edge_map)
        if (!inst.request.edges.count(e)) fail("mapping of unknown request edge " + edge_name(e));
    return rep;
}

std::map<Resource, double> allocations(const Instance& inst, const Mapping& m) {
    auto rep = validate_mapping(inst, m);
    if (!rep.valid) throw ValidationError("allocations of invalid mapping: " + rep.violations.front());
    std::map<Resource, double> out;
    for (const auto& [i, u] : m.node_map) {
        double d = inst.request.node_demand.at(i);
        if (d != 0.0) out[Resource::of_node(u, inst.request.node_type.at(i))] += d;
    }
    for (const auto& [e, p] : m.edge_map) {
        double d = inst.request.edge_demand.at(e);
        if (d == 0.0) continue;
        for (const auto& se : p) out[Resource::of_edge(se)] += d;
    }
    return out;
}

double mapping_cost(const Instance& inst, const Mapping& m) {
    double total = 0.0;
    for (const auto& [res, amount] : allocations(inst, m)) total += inst.cost(res) * amount;
    return total;
}

bool respects_capacities(const Instance& inst, const Mapping& m, double tolerance) {
    for (const auto& [res, amount] : allocations(inst, m))
        if (amount > inst.capacity(res) + tolerance) return false;
    return true;
}

Mapping project_mapping(const Mapping& m, const std::set<NodeId>& nodes, const std::set<Edge>& edges) {
    Mapping out;
    for (const auto& [i, u] : m.node_map)
        if (nodes.count(i)) out.node_map.emplace(i, u);
    for (const auto& [e, p] : m.edge_map)
        if (edges.count(e)) out.edge_map.emplace(e, p);
    return out;
}

double ConvexCombination::total() const {
    double t = 0.0;
    for (const auto& entry : entries) t += entry.value;
    return t;
}

json mapping_to_json(const Mapping& m) {
    json nodes = json::object();
    for (const auto& [i, u] : m.node_map) nodes[i] = u;
    json edges = json::object();
    for (const auto& [e, p] : m.edge_map) {
        json path = json::array();
        for (const auto& se : p) path.push_back(json::array({se.first, se.second}));
        edges[edge_name(e)] = path;
    }
    return {{"node_map", nodes}, {"edge_map", edges}};
}

Mapping mapping_from_json(const json& j) {
    Mapping m;
    for (const auto& [i, u] : field(j, "node_map", "mapping").items()) m.node_map[i] = u.get<std::string>();
    for (const auto& [key, path] : field(j, "edge_map", "mapping").items()) {
        auto arrow = key.find("->");
        if (arrow == std::string::npos) throw ParseError("edge key '" + key + "' is not <tail>-><head>");
        Path p;
        for (const auto& se : path) {
            if (!se.is_array() || se.size() != 2) throw ParseError("path element must be a [tail, head] pair");
            p.emplace_back(se[0].get<std::string>(), se[1].get<std::string>());
        }
        m.edge_map[{key.substr(0, arrow), key.substr(arrow + 2)}] = std::move(p);
    }
    return m;
}

json combination_to_json(const ConvexCombination& d) {
    json out = json::array();
    for (const auto& entry : d.entries) {
        json item = mapping_to_json(entry.mapping);
        item["value"] = entry.value;
        out.push_back(std::move(item));
    }
    return out;
}

ConvexCombination combination_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("convex combination must be an array");
    ConvexCombination d;
    for (const auto& item : j)
        d.entries.push_back({number(field(item, "value", "combination entry"), "value"), mapping_from_json(item)});
    return d;
}

}  // namespace vnep
