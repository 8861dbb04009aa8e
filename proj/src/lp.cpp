/**
 * @file lp.cpp
 * @brief Program model, formulation builders, lifting, LP text I/O.
 */
#include "vnep/lp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "vnep/error.hpp"

namespace vnep {

// ------------------------------------------------------------------ program

std::size_t LpProgram::add_variable(std::string name, double lower, double upper) {
    auto [it, fresh] = index_.emplace(name, variables_.size());
    if (!fresh) throw ValidationError("duplicate variable " + name);
    variables_.push_back({std::move(name), lower, upper});
    return it->second;
}

std::optional<std::size_t> LpProgram::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t LpProgram::index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ValidationError("unknown variable " + name);
    return it->second;
}

void LpProgram::set_bounds(std::size_t var, double lower, double upper) {
    variables_.at(var).lower = lower;
    variables_.at(var).upper = upper;
}

namespace {

std::vector<LpTerm> merge_terms(std::vector<LpTerm> terms, std::size_t n_vars) {
    std::sort(terms.begin(), terms.end(), [](const LpTerm& a, const LpTerm& b) { return a.var < b.var; });
    std::vector<LpTerm> out;
    for (const auto& t : terms) {
        if (t.var >= n_vars) throw ValidationError("term references an undeclared variable");
        if (!out.empty() && out.back().var == t.var)
            out.back().coef += t.coef;
        else
            out.push_back(t);
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const LpTerm& t) { return t.coef == 0.0; }), out.end());
    return out;
}

}  // namespace

void LpProgram::add_constraint(std::string name, std::vector<LpTerm> terms, Relation relation, double rhs) {
    constraints_.push_back({std::move(name), merge_terms(std::move(terms), variables_.size()), relation, rhs});
}

void LpProgram::set_objective(std::vector<LpTerm> terms, Sense sense) {
    objective_ = merge_terms(std::move(terms), variables_.size());
    sense_ = sense;
}

// ------------------------------------------------------------------- naming

std::string mapping_key(const LabelMapping& m) {
    std::string out;
    for (const auto& [k, u] : m) {
        if (!out.empty()) out += ",";
        out += k + ":" + u;
    }
    return out;
}

std::vector<LabelMapping> mapping_space(const Instance& instance, const LabelSet& labels) {
    std::vector<LabelMapping> out{LabelMapping{}};
    for (const auto& k : labels) {
        auto type = instance.request.node_type.find(k);
        if (type == instance.request.node_type.end()) throw ValidationError("label " + k + " is not a request node");
        const auto hosts = instance.substrate.nodes_supporting(type->second);
        std::vector<LabelMapping> next;
        next.reserve(out.size() * hosts.size());
        for (const auto& partial : out)
            for (const auto& u : hosts) {
                auto m = partial;
                m.emplace(k, u);
                next.push_back(std::move(m));
            }
        out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

LabelMapping restrict_mapping(const LabelMapping& m, const LabelSet& labels) {
    LabelMapping out;
    for (const auto& k : labels)
        if (auto it = m.find(k); it != m.end()) out.emplace(k, it->second);
    return out;
}

VariableKey VariableKey::node(const NodeId& i, const NodeId& u) {
    VariableKey k;
    k.kind = Kind::GlobalNode;
    k.request_node = i;
    k.substrate_node = u;
    return k;
}

VariableKey VariableKey::allocation(const Resource& r) {
    VariableKey k;
    k.kind = Kind::GlobalAllocation;
    k.resource = r;
    return k;
}

VariableKey VariableKey::flow(const Edge& request_edge, const Edge& substrate_edge) {
    VariableKey k;
    k.kind = Kind::SubEdge;
    k.request_edge = request_edge;
    k.substrate_edge = substrate_edge;
    return k;
}

VariableKey VariableKey::sub_node(const NodeId& i, const NodeId& u, const Edge& request_edge, const LabelMapping& m) {
    VariableKey k;
    k.kind = Kind::SubNode;
    k.request_node = i;
    k.substrate_node = u;
    k.request_edge = request_edge;
    k.mapping = m;
    return k;
}

VariableKey VariableKey::sub_flow(const Edge& request_edge, const Edge& substrate_edge, const LabelMapping& m) {
    VariableKey k = flow(request_edge, substrate_edge);
    k.mapping = m;
    k.in_subformulation = true;
    return k;
}

VariableKey VariableKey::gamma(const NodeId& i, const NodeId& u, std::size_t set_index, const LabelMapping& m,
                               const std::string& scope) {
    VariableKey k;
    k.kind = Kind::Gamma;
    k.request_node = i;
    k.substrate_node = u;
    k.set_index = set_index;
    k.mapping = m;
    k.scope = scope;
    return k;
}

std::string VariableKey::str() const {
    switch (kind) {
        case Kind::GlobalNode:
            return "y[" + request_node + "@" + substrate_node + "]";
        case Kind::GlobalAllocation:
            return "a[" + resource.name() + "]";
        case Kind::SubNode:
            return "y[" + request_node + "@" + substrate_node + "|" + edge_name(request_edge) + "|" +
                   mapping_key(mapping) + "]";
        case Kind::SubEdge:
            return "z[" + edge_name(request_edge) + "@" + edge_name(substrate_edge) +
                   (in_subformulation ? "|" + mapping_key(mapping) : std::string()) + "]";
        case Kind::Gamma:
            return "g[" + request_node + "@" + substrate_node + "|" + std::to_string(set_index + 1) + "|" +
                   mapping_key(mapping) + (scope.empty() ? std::string() : "|" + scope) + "]";
    }
    return {};
}

// ----------------------------------------------------------------- builders

namespace {

bool node_too_small(const Instance& inst, const NodeId& i, const NodeId& u) {
    const auto& type = inst.request.node_type.at(i);
    return inst.request.node_demand.at(i) > inst.capacity(Resource::of_node(u, type));
}

bool edge_too_small(const Instance& inst, const Edge& request_edge, const Edge& substrate_edge) {
    return inst.request.edge_demand.at(request_edge) > inst.capacity(Resource::of_edge(substrate_edge));
}

/// Shared parts of both formulations: global node variables, allocation
/// variables, node embedding, load rows and the objective.
class FormulationBase {
public:
    explicit FormulationBase(const Instance& inst) : inst_(inst) {
        for (const auto& i : inst.request.nodes)
            for (const auto& u : hosts(i)) {
                auto v = program.add_variable(VariableKey::node(i, u).str(), 0.0, 1.0);
                if (node_too_small(inst, i, u)) program.set_bounds(v, 0.0, 0.0);
            }
        for (const auto& r : inst.resources())
            program.add_variable(VariableKey::allocation(r).str(), 0.0, inst.capacity(r));
    }

    const std::vector<NodeId>& hosts(const NodeId& i) {
        auto it = hosts_.find(i);
        if (it == hosts_.end())
            it = hosts_.emplace(i, inst_.substrate.nodes_supporting(inst_.request.node_type.at(i))).first;
        return it->second;
    }

    std::size_t var(const VariableKey& key) { return program.index(key.str()); }

    /// y-variable of a request node inside a subformulation; created on first use.
    std::size_t sub_node_var(const NodeId& i, const NodeId& u, const Edge& request_edge, const LabelMapping& m,
                             const LabelSet& edge_labels) {
        auto name = VariableKey::sub_node(i, u, request_edge, m).str();
        if (auto v = program.find(name)) return *v;
        auto v = program.add_variable(name, 0.0, 1.0);
        bool inconsistent = edge_labels.count(i) && m.at(i) != u;
        if (inconsistent || node_too_small(inst_, i, u)) program.set_bounds(v, 0.0, 0.0);
        return v;
    }

    /// Flow conservation of one request edge: out − in = y_tail − y_head.
    void add_flow_rows(const Edge& request_edge, const std::string& suffix,
                       const std::map<Edge, std::size_t>& flow_vars,
                       const std::map<NodeId, std::size_t>& tail_vars,
                       const std::map<NodeId, std::size_t>& head_vars) {
        for (const auto& u : inst_.substrate.nodes) {
            std::vector<LpTerm> terms;
            for (const auto& v : inst_.substrate.successors(u)) terms.push_back({flow_vars.at({u, v}), 1.0});
            for (const auto& v : inst_.substrate.predecessors(u)) terms.push_back({flow_vars.at({v, u}), -1.0});
            if (auto it = tail_vars.find(u); it != tail_vars.end()) terms.push_back({it->second, -1.0});
            if (auto it = head_vars.find(u); it != head_vars.end()) terms.push_back({it->second, 1.0});
            program.add_constraint("flow[" + edge_name(request_edge) + suffix + "@" + u + "]", std::move(terms),
                                   Relation::Equal, 0.0);
        }
    }

    void add_edge_load(const Edge& request_edge, const Edge& substrate_edge, std::size_t flow_var) {
        double d = inst_.request.edge_demand.at(request_edge);
        if (d != 0.0) edge_load_[substrate_edge].push_back({flow_var, -d});
    }

    LpProgram finish() {
        for (const auto& i : inst_.request.nodes) {
            std::vector<LpTerm> terms;
            for (const auto& u : hosts(i)) terms.push_back({var(VariableKey::node(i, u)), 1.0});
            program.add_constraint("embed[" + i + "]", std::move(terms), Relation::Equal, 1.0);
        }
        std::vector<LpTerm> objective;
        for (const auto& r : inst_.resources()) {
            auto a = var(VariableKey::allocation(r));
            std::vector<LpTerm> terms{{a, 1.0}};
            if (r.kind == Resource::Kind::Node) {
                for (const auto& i : inst_.request.nodes)
                    if (inst_.request.node_type.at(i) == r.detail && inst_.request.node_demand.at(i) != 0.0)
                        terms.push_back({var(VariableKey::node(i, r.node)), -inst_.request.node_demand.at(i)});
            } else if (auto it = edge_load_.find(r.edge()); it != edge_load_.end()) {
                terms.insert(terms.end(), it->second.begin(), it->second.end());
            }
            program.add_constraint("load[" + r.name() + "]", std::move(terms), Relation::Equal, 0.0);
            if (double c = inst_.cost(r); c != 0.0) objective.push_back({a, c});
        }
        program.set_objective(std::move(objective), Sense::Minimize);
        return std::move(program);
    }

    LpProgram program;

private:
    const Instance& inst_;
    std::map<NodeId, std::vector<NodeId>> hosts_;
    std::map<Edge, std::vector<LpTerm>> edge_load_;
};

}  // namespace

LpProgram build_mcf(const Instance& inst, bool /*relaxed*/) {
    validate_instance(inst);
    FormulationBase base(inst);
    for (const auto& e : inst.request.edges) {
        std::map<Edge, std::size_t> flows;
        for (const auto& se : inst.substrate.edges) {
            auto v = base.program.add_variable(VariableKey::flow(e, se).str(), 0.0, 1.0);
            if (edge_too_small(inst, e, se)) base.program.set_bounds(v, 0.0, 0.0);
            flows.emplace(se, v);
            base.add_edge_load(e, se, v);
        }
        std::map<NodeId, std::size_t> tails;
        std::map<NodeId, std::size_t> heads;
        for (const auto& u : base.hosts(e.first)) tails.emplace(u, base.var(VariableKey::node(e.first, u)));
        for (const auto& u : base.hosts(e.second)) heads.emplace(u, base.var(VariableKey::node(e.second, u)));
        base.add_flow_rows(e, "", flows, tails, heads);
    }
    return base.finish();
}

namespace {

const LabelSet& labels_of(const EdgeLabelAssignment& labels, const Edge& e) {
    static const LabelSet empty;
    auto it = labels.find(e);
    return it == labels.end() ? empty : it->second;
}

/// Mapping-space elements of a set grouped by their restriction to a subset.
std::map<LabelMapping, std::vector<LabelMapping>> group_by_restriction(const std::vector<LabelMapping>& space,
                                                                       const LabelSet& subset) {
    std::map<LabelMapping, std::vector<LabelMapping>> groups;
    for (const auto& m : space) groups[restrict_mapping(m, subset)].push_back(m);
    return groups;
}

}  // namespace

LpProgram build_adapted_scoped(const Instance& inst, const OrientedGraph& graph, const EdgeLabelAssignment& labels,
                               const std::vector<GammaScope>& scopes) {
    validate_instance(inst);
    FormulationBase base(inst);
    auto& p = base.program;

    // Subformulations: one copy of the flow constraints per edge and edge-label mapping.
    for (const auto& [e, reversed] : graph.edges()) {
        const Edge orig = graph.original(e);
        const LabelSet& le = labels_of(labels, e);
        for (const auto& m : mapping_space(inst, le)) {
            const std::string suffix = "|" + mapping_key(m);
            std::map<Edge, std::size_t> flows;
            for (const auto& se : inst.substrate.edges) {
                auto v = p.add_variable(VariableKey::sub_flow(orig, se, m).str(), 0.0, 1.0);
                if (edge_too_small(inst, orig, se)) p.set_bounds(v, 0.0, 0.0);
                flows.emplace(se, v);
                base.add_edge_load(orig, se, v);
            }
            std::map<NodeId, std::size_t> tails;
            std::map<NodeId, std::size_t> heads;
            for (const auto& u : base.hosts(orig.first))
                tails.emplace(u, base.sub_node_var(orig.first, u, orig, m, le));
            for (const auto& u : base.hosts(orig.second))
                heads.emplace(u, base.sub_node_var(orig.second, u, orig, m, le));
            base.add_flow_rows(orig, suffix, flows, tails, heads);
        }
    }

    // Node-to-subformulation aggregation for every incident edge.
    for (const auto& i : graph.nodes()) {
        std::vector<Edge> incident = graph.out_edges(i);
        incident.insert(incident.end(), graph.in_edges(i).begin(), graph.in_edges(i).end());
        for (const auto& e : incident) {
            const Edge orig = graph.original(e);
            const auto space = mapping_space(inst, labels_of(labels, e));
            for (const auto& u : base.hosts(i)) {
                std::vector<LpTerm> terms{{base.var(VariableKey::node(i, u)), 1.0}};
                for (const auto& m : space) terms.push_back({base.var(VariableKey::sub_node(i, u, orig, m)), -1.0});
                p.add_constraint("tosub[" + i + "@" + u + "|" + edge_name(orig) + "]", std::move(terms),
                                 Relation::Equal, 0.0);
            }
        }
    }

    for (const auto& scope : scopes) {
        const std::string tag = scope.tag.empty() ? std::string() : "|" + scope.tag;
        for (const auto& i : scope.graph.nodes()) {
            const NodeOrdering& w = scope.omega.at(i);
            std::vector<std::vector<LabelMapping>> spaces;
            for (const auto& s : w.sets) spaces.push_back(mapping_space(inst, s));
            auto gamma = [&](const NodeId& u, std::size_t a, const LabelMapping& m) {
                return base.var(VariableKey::gamma(i, u, a, m, scope.tag));
            };
            for (std::size_t a = 0; a < w.sets.size(); ++a)
                for (const auto& m : spaces[a])
                    for (const auto& u : base.hosts(i))
                        p.add_variable(VariableKey::gamma(i, u, a, m, scope.tag).str(), 0.0, 1.0);

            std::vector<bool> anchored(w.sets.size(), false);
            // In-edges fix the first layer.
            const auto& in = scope.graph.in_edges(i);
            if (!in.empty()) anchored[0] = true;
            for (const auto& e : in) {
                const Edge orig = graph.original(e);
                if (labels_of(labels, e) != w.sets[0])
                    throw ValidationError("first label set of " + i + " differs from the labels of " + edge_name(e));
                for (const auto& u : base.hosts(i))
                    for (const auto& m : spaces[0])
                        p.add_constraint("gin[" + i + "@" + u + "|" + edge_name(orig) + "|" + mapping_key(m) + tag + "]",
                                         {{base.var(VariableKey::sub_node(i, u, orig, m)), 1.0}, {gamma(u, 0, m), -1.0}},
                                         Relation::Equal, 0.0);
            }
            // Out-edges draw their flow from their representative layer.
            for (const auto& e : scope.graph.out_edges(i)) {
                auto rep = w.representative.find(e);
                if (rep == w.representative.end())
                    throw ValidationError("out-edge " + edge_name(e) + " has no representative label set");
                const std::size_t a = rep->second;
                anchored[a] = true;
                const Edge orig = graph.original(e);
                const LabelSet& le = labels_of(labels, e);
                const auto groups = group_by_restriction(spaces[a], le);
                for (const auto& u : base.hosts(i))
                    for (const auto& m : mapping_space(inst, le)) {
                        std::vector<LpTerm> terms{{base.var(VariableKey::sub_node(i, u, orig, m)), 1.0}};
                        if (auto g = groups.find(m); g != groups.end())
                            for (const auto& alpha : g->second) terms.push_back({gamma(u, a, alpha), -1.0});
                        p.add_constraint("gout[" + i + "@" + u + "|" + edge_name(orig) + "|" + mapping_key(m) + tag + "]",
                                         std::move(terms), Relation::Equal, 0.0);
                    }
            }
            // Continuity between each layer and its predecessor layer.
            for (std::size_t a = 0; a < w.sets.size(); ++a) {
                const std::size_t pa = w.predecessor_index[a];
                if (pa == a) continue;
                const LabelSet& lp = w.predecessor_set[a];
                const auto here = group_by_restriction(spaces[a], lp);
                const auto there = group_by_restriction(spaces[pa], lp);
                for (const auto& u : base.hosts(i))
                    for (const auto& mp : mapping_space(inst, lp)) {
                        std::vector<LpTerm> terms;
                        if (auto g = here.find(mp); g != here.end())
                            for (const auto& alpha : g->second) terms.push_back({gamma(u, a, alpha), 1.0});
                        if (auto g = there.find(mp); g != there.end())
                            for (const auto& beta : g->second) terms.push_back({gamma(u, pa, beta), -1.0});
                        p.add_constraint("gcont[" + i + "@" + u + "|" + std::to_string(a + 1) + "|" + mapping_key(mp) +
                                             tag + "]",
                                         std::move(terms), Relation::Equal, 0.0);
                    }
            }
            // Layers tied to nothing else are anchored to the node's global mapping.
            for (std::size_t a = 0; a < w.sets.size(); ++a) {
                if (anchored[a]) continue;
                for (const auto& u : base.hosts(i)) {
                    std::vector<LpTerm> terms{{base.var(VariableKey::node(i, u)), -1.0}};
                    for (const auto& m : spaces[a]) terms.push_back({gamma(u, a, m), 1.0});
                    p.add_constraint("ganchor[" + i + "@" + u + "|" + std::to_string(a + 1) + tag + "]",
                                     std::move(terms), Relation::Equal, 0.0);
                }
            }
        }
    }
    return base.finish();
}

LpProgram build_adapted(const Instance& inst, const ExtractionOrder& order, const EdgeLabelAssignment& labels,
                        const LabelSetOrdering& omega) {
    auto label_report = check_decomposable_labels(order, labels);
    if (!label_report.passed())
        throw ValidationError("labels are not decomposable: " + label_report.messages.front());
    auto ordering_report = validate_ordering(order, labels, omega);
    if (!ordering_report.passed())
        throw ValidationError("invalid label set ordering: " + ordering_report.violations.front().message);
    return build_adapted_scoped(inst, order, labels, {GammaScope{"", order, omega}});
}

// ------------------------------------------------------------------- lifting

namespace {

void require_complete(const Instance& inst, const ConvexCombination& d) {
    if (std::abs(d.total() - 1.0) > 1e-7) throw ValidationError("convex combination is incomplete");
    for (const auto& entry : d.entries) {
        if (!(entry.value > 0.0)) throw ValidationError("convex combination has a nonpositive value");
        auto rep = validate_mapping(inst, entry.mapping);
        if (!rep.valid) throw ValidationError("convex combination contains an invalid mapping: " + rep.violations.front());
    }
}

void add_allocations(const Instance& inst, const CombinationEntry& entry, Assignment& out) {
    for (const auto& [r, amount] : allocations(inst, entry.mapping))
        out[VariableKey::allocation(r).str()] += entry.value * amount;
}

}  // namespace

Assignment lift_to_mcf(const Instance& inst, const ConvexCombination& d) {
    require_complete(inst, d);
    Assignment out;
    for (const auto& entry : d.entries) {
        const auto& m = entry.mapping;
        for (const auto& [i, u] : m.node_map) out[VariableKey::node(i, u).str()] += entry.value;
        for (const auto& [e, path] : m.edge_map)
            for (const auto& se : path) out[VariableKey::flow(e, se).str()] += entry.value;
        add_allocations(inst, entry, out);
    }
    return out;
}

Assignment lift_convex_combination_scoped(const Instance& inst, const OrientedGraph& graph,
                                          const EdgeLabelAssignment& labels, const std::vector<GammaScope>& scopes,
                                          const ConvexCombination& d) {
    require_complete(inst, d);
    Assignment out;
    for (const auto& entry : d.entries) {
        const auto& m = entry.mapping;
        const LabelMapping full(m.node_map.begin(), m.node_map.end());
        const double f = entry.value;
        for (const auto& [i, u] : m.node_map) out[VariableKey::node(i, u).str()] += f;
        for (const auto& [e, reversed] : graph.edges()) {
            const Edge orig = graph.original(e);
            const auto me = restrict_mapping(full, labels_of(labels, e));
            out[VariableKey::sub_node(orig.first, full.at(orig.first), orig, me).str()] += f;
            out[VariableKey::sub_node(orig.second, full.at(orig.second), orig, me).str()] += f;
            for (const auto& se : m.edge_map.at(orig)) out[VariableKey::sub_flow(orig, se, me).str()] += f;
        }
        for (const auto& scope : scopes)
            for (const auto& i : scope.graph.nodes()) {
                const auto& w = scope.omega.at(i);
                for (std::size_t a = 0; a < w.sets.size(); ++a)
                    out[VariableKey::gamma(i, full.at(i), a, restrict_mapping(full, w.sets[a]), scope.tag).str()] += f;
            }
        add_allocations(inst, entry, out);
    }
    return out;
}

Assignment lift_convex_combination(const Instance& inst, const ExtractionOrder& order,
                                   const EdgeLabelAssignment& labels, const LabelSetOrdering& omega,
                                   const ConvexCombination& d) {
    return lift_convex_combination_scoped(inst, order, labels, {GammaScope{"", order, omega}}, d);
}

// ------------------------------------------------------------------ LP text

namespace {

std::string format_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_terms(std::ostringstream& out, const LpProgram& p, const std::vector<LpTerm>& terms) {
    for (const auto& t : terms) {
        out << (t.coef < 0 ? " - " : " + ") << format_number(std::abs(t.coef)) << " " << p.variables()[t.var].name;
    }
}

double parse_number(const std::string& token) {
    std::string t = token;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "inf" || t == "+inf" || t == "infinity" || t == "+infinity") return kInfinity;
    if (t == "-inf" || t == "-infinity") return -kInfinity;
    double x = 0.0;
    const char* begin = token.data() + (token.front() == '+' ? 1 : 0);
    auto res = std::from_chars(begin, token.data() + token.size(), x);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw ParseError("LP text: expected a number, found '" + token + "'");
    return x;
}

bool is_number(const std::string& token) {
    try {
        parse_number(token);
        return true;
    } catch (const ParseError&) {
        return false;
    }
}

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> tokens;
    for (std::string t; in >> t;) tokens.push_back(t);
    return tokens;
}

}  // namespace

std::string export_lp(const LpProgram& p) {
    std::ostringstream out;
    out << "\\ vnep linear program\n";
    out << (p.sense() == Sense::Minimize ? "Minimize" : "Maximize") << "\n obj:";
    write_terms(out, p, p.objective());
    out << "\nSubject To\n";
    for (const auto& c : p.constraints()) {
        out << " " << c.name << ":";
        write_terms(out, p, c.terms);
        if (c.terms.empty()) out << " 0 " << p.variables().front().name;
        out << (c.relation == Relation::Equal ? " = " : c.relation == Relation::LessEqual ? " <= " : " >= ")
            << format_number(c.rhs) << "\n";
    }
    out << "Bounds\n";
    for (const auto& v : p.variables()) {
        if (v.lower == v.upper)
            out << " " << v.name << " = " << format_number(v.lower) << "\n";
        else if (std::isinf(v.lower) && std::isinf(v.upper))
            out << " " << v.name << " free\n";
        else
            out << " " << format_number(v.lower) << " <= " << v.name << " <= " << format_number(v.upper) << "\n";
    }
    out << "End\n";
    return out.str();
}

LpProgram parse_lp(const std::string& text) {
    enum class Section { None, Objective, Constraints, Bounds, Done };
    Section section = Section::None;
    LpProgram p;
    Sense sense = Sense::Minimize;
    struct PendingRow {
        std::string name;
        std::vector<std::pair<std::string, double>> terms;
        Relation relation;
        double rhs;
    };
    std::vector<std::pair<std::string, double>> objective;
    std::vector<PendingRow> rows;
    std::vector<std::tuple<std::string, double, double>> bounds;
    std::vector<std::string> order;  // first-appearance order of variable names
    std::set<std::string> seen;
    auto note = [&](const std::string& name) {
        if (seen.insert(name).second) order.push_back(name);
    };

    auto parse_expression = [&](const std::vector<std::string>& tokens, std::size_t from, std::size_t to) {
        std::vector<std::pair<std::string, double>> terms;
        double sign = 1.0;
        double coef = 1.0;
        bool have_coef = false;
        for (std::size_t k = from; k < to; ++k) {
            const auto& t = tokens[k];
            if (t == "+" || t == "-") {
                sign = t == "-" ? -1.0 : 1.0;
            } else if (!have_coef && is_number(t)) {
                coef = parse_number(t);
                have_coef = true;
            } else {
                terms.emplace_back(t, sign * coef);
                note(t);
                sign = 1.0;
                coef = 1.0;
                have_coef = false;
            }
        }
        return terms;
    };

    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (auto cut = line.find('\\'); cut != std::string::npos) line.erase(cut);
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        std::string head = tokens.front();
        std::string lower = head;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
        if (lower == "minimize" || lower == "maximize") {
            sense = lower == "minimize" ? Sense::Minimize : Sense::Maximize;
            section = Section::Objective;
            continue;
        }
        if (lower == "subject" && tokens.size() > 1) {
            section = Section::Constraints;
            continue;
        }
        if (lower == "bounds") {
            section = Section::Bounds;
            continue;
        }
        if (lower == "end") {
            section = Section::Done;
            continue;
        }
        switch (section) {
            case Section::Objective: {
                std::size_t from = head.back() == ':' ? 1 : 0;
                auto terms = parse_expression(tokens, from, tokens.size());
                objective.insert(objective.end(), terms.begin(), terms.end());
                break;
            }
            case Section::Constraints: {
                if (head.back() != ':') throw ParseError("LP text: constraint without name: " + line);
                std::size_t rel = 1;
                while (rel < tokens.size() && tokens[rel] != "=" && tokens[rel] != "<=" && tokens[rel] != ">=") ++rel;
                if (rel + 2 != tokens.size()) throw ParseError("LP text: malformed constraint: " + line);
                Relation r = tokens[rel] == "=" ? Relation::Equal
                             : tokens[rel] == "<=" ? Relation::LessEqual
                                                   : Relation::GreaterEqual;
                rows.push_back({head.substr(0, head.size() - 1), parse_expression(tokens, 1, rel), r,
                                parse_number(tokens[rel + 1])});
                break;
            }
            case Section::Bounds: {
                if (tokens.size() == 2 && tokens[1] == "free") {
                    note(tokens[0]);
                    bounds.emplace_back(tokens[0], -kInfinity, kInfinity);
                } else if (tokens.size() == 3 && tokens[1] == "=") {
                    note(tokens[0]);
                    double x = parse_number(tokens[2]);
                    bounds.emplace_back(tokens[0], x, x);
                } else if (tokens.size() == 5 && tokens[1] == "<=" && tokens[3] == "<=") {
                    note(tokens[2]);
                    bounds.emplace_back(tokens[2], parse_number(tokens[0]), parse_number(tokens[4]));
                } else if (tokens.size() == 3 && (tokens[1] == ">=" || tokens[1] == "<=")) {
                    note(tokens[0]);
                    double x = parse_number(tokens[2]);
                    bounds.emplace_back(tokens[0], tokens[1] == ">=" ? x : 0.0, tokens[1] == ">=" ? kInfinity : x);
                } else {
                    throw ParseError("LP text: malformed bound: " + line);
                }
                break;
            }
            default:
                throw ParseError("LP text: content outside of a section: " + line);
        }
    }
    if (section != Section::Done) throw ParseError("LP text: missing End");
    for (const auto& name : order) p.add_variable(name);
    for (const auto& [name, lo, hi] : bounds) p.set_bounds(p.index(name), lo, hi);
    auto to_terms = [&](const std::vector<std::pair<std::string, double>>& named) {
        std::vector<LpTerm> terms;
        for (const auto& [name, c] : named) terms.push_back({p.index(name), c});
        return terms;
    };
    for (const auto& r : rows) p.add_constraint(r.name, to_terms(r.terms), r.relation, r.rhs);
    p.set_objective(to_terms(objective), sense);
    return p;
}

// -------------------------------------------------------------- feasibility

FeasibilityReport check_feasible(const LpProgram& p, const Assignment& assignment, double tolerance) {
    FeasibilityReport rep;
    std::vector<double> x(p.variables().size(), 0.0);
    for (const auto& [name, value] : assignment) {
        if (auto v = p.find(name))
            x[*v] = value;
        else {
            rep.feasible = false;
            rep.violated.push_back("unknown variable " + name);
        }
    }
    auto record = [&](double residual, const std::string& what) {
        rep.max_residual = std::max(rep.max_residual, residual);
        if (residual > tolerance) {
            rep.feasible = false;
            rep.violated.push_back(what + " (residual " + format_number(residual) + ")");
        }
    };
    for (std::size_t v = 0; v < x.size(); ++v) {
        const auto& var = p.variables()[v];
        record(std::max(var.lower - x[v], x[v] - var.upper), "bounds of " + var.name);
    }
    for (const auto& c : p.constraints()) {
        double lhs = 0.0;
        for (const auto& t : c.terms) lhs += t.coef * x[t.var];
        double residual = c.relation == Relation::Equal       ? std::abs(lhs - c.rhs)
                          : c.relation == Relation::LessEqual ? lhs - c.rhs
                                                              : c.rhs - lhs;
        record(residual, c.name);
    }
    return rep;
}

double objective_value(const LpProgram& p, const Assignment& assignment) {
    double total = 0.0;
    for (const auto& t : p.objective()) {
        auto it = assignment.find(p.variables()[t.var].name);
        if (it != assignment.end()) total += t.coef * it->second;
    }
    return total;
}

}  // namespace vnep
