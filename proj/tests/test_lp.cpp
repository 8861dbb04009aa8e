// Formulation builders, lifting, LP text round trips and feasibility checks.
#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles/oracles.hpp"
#include "vnep/error.hpp"
#include "vnep/generators.hpp"
#include "vnep/oracle.hpp"
#include "vnep/solver.hpp"

using namespace vnep;

namespace {

std::size_t count_prefix(const LpProgram& p, const std::string& prefix) {
    std::size_t n = 0;
    for (const auto& v : p.variables()) n += v.name.rfind(prefix, 0) == 0 ? 1 : 0;
    return n;
}

/// Random convex combination of enumerated valid mappings.
ConvexCombination random_combination(const Instance& inst, std::mt19937_64& rng) {
    OracleBudget budget;
    budget.max_path_hops = 2;
    const auto all = enumerate_valid_mappings(inst, budget);
    REQUIRE_FALSE(all.empty());
    ConvexCombination d;
    const std::size_t k = 1 + rng() % 4;
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    double total = 0.0;
    for (std::size_t n = 0; n < k; ++n) {
        d.entries.push_back({weight(rng), all[rng() % all.size()].mapping});
        total += d.entries.back().value;
    }
    for (auto& e : d.entries) e.value /= total;
    return d;
}

/// Order-independent description of a program: bounds, rows and objective by name.
using CanonicalProgram =
    std::tuple<std::map<std::string, std::pair<double, double>>,
               std::map<std::string, std::tuple<std::map<std::string, double>, Relation, double>>,
               std::map<std::string, double>, Sense>;

CanonicalProgram canonical(const LpProgram& p) {
    CanonicalProgram c;
    auto& [bounds, rows, objective, sense] = c;
    const auto named = [&](const std::vector<LpTerm>& terms) {
        std::map<std::string, double> out;
        for (const auto& t : terms) out[p.variables()[t.var].name] += t.coef;
        return out;
    };
    for (const auto& v : p.variables()) bounds[v.name] = {v.lower, v.upper};
    for (const auto& r : p.constraints()) rows[r.name] = {named(r.terms), r.relation, r.rhs};
    objective = named(p.objective());
    sense = p.sense();
    return c;
}

double combination_cost(const Instance& inst, const ConvexCombination& d) {
    double c = 0.0;
    for (const auto& e : d.entries) c += e.value * mapping_cost(inst, e.mapping);
    return c;
}

}  // namespace

TEST_CASE("MCF program size for a single edge on the triangle") {
    const Instance inst = fixtures::single_edge_on_triangle();
    const LpProgram p = build_mcf(inst);
    CHECK(count_prefix(p, "y[") == 2 * 3);
    CHECK(count_prefix(p, "z[") == 6);
    CHECK(count_prefix(p, "a[") == 3 + 6);
    CHECK(p.variables().size() == 6 + 6 + 9);
    // Flow conservation per substrate node, embedding per request node, one load row per resource.
    CHECK(p.constraints().size() == 3 + 2 + 9);
}

TEST_CASE("a node demand above every capacity makes the program infeasible") {
    auto b = fixtures::triangle_substrate(1.0);
    b.node("i", 5.0).node("j").edge("i", "j");
    const Instance inst = b.build();
    const LpProgram p = build_mcf(inst);
    for (const auto& u : {"u", "v", "w"}) {
        const auto& var = p.variables()[p.index(std::string("y[i@") + u + "]")];
        CHECK(var.upper == 0.0);
    }
    CHECK(solve_lp(p).status == SolveStatus::Infeasible);
}

TEST_CASE("fractional single-edge flow of value 0.5 is feasible") {
    const Instance inst = fixtures::single_edge_on_triangle();
    Assignment x{{"y[i@u]", 0.5}, {"y[i@v]", 0.5}, {"y[j@v]", 0.5}, {"y[j@w]", 0.5},
                 {"z[i->j@u->v]", 0.5}, {"z[i->j@v->w]", 0.5}};
    fixtures::add_unit_allocations(inst, x);
    const auto report = check_feasible(build_mcf(inst), x, 1e-9);
    CHECK(report.feasible);
    CHECK(report.max_residual <= 1e-12);
}

TEST_CASE("the all-zero assignment violates the embedding rows") {
    const auto report = check_feasible(build_mcf(fixtures::single_edge_on_triangle()), {}, 1e-9);
    CHECK_FALSE(report.feasible);
    CHECK(std::any_of(report.violated.begin(), report.violated.end(),
                      [](const std::string& v) { return v.rfind("embed[i] ", 0) == 0; }));
    CHECK(report.max_residual == doctest::Approx(1.0));
}

TEST_CASE("lifting four single-edge mappings into the MCF program") {
    const Instance inst = fixtures::single_edge_on_triangle();
    const auto lifted = lift_to_mcf(inst, fixtures::four_single_edge_mappings());
    CHECK(lifted.at("y[i@u]") == doctest::Approx(0.5));
    CHECK(lifted.at("y[i@w]") == doctest::Approx(0.5));
    CHECK(lifted.at("y[j@v]") == doctest::Approx(0.4));
    CHECK(lifted.at("z[i->j@u->v]") == doctest::Approx(0.2));
    CHECK(lifted.at("z[i->j@w->v]") == doctest::Approx(0.2));
    CHECK_FALSE(lifted.count("z[i->j@u->w]"));
    CHECK(check_feasible(build_mcf(inst), lifted, 1e-9).feasible);
    CHECK(objective_value(build_mcf(inst), lifted) ==
          doctest::Approx(combination_cost(inst, fixtures::four_single_edge_mappings())));
}

TEST_CASE("the non-decomposable fixture's 0.5 assignment is MCF-feasible") {
    const Instance inst = fixtures::non_decomposable_fixture();
    Assignment x = fixtures::non_decomposable_assignment();
    fixtures::add_unit_allocations(inst, x);
    const auto report = check_feasible(build_mcf(inst), x, 1e-9);
    CHECK(report.feasible);
    CHECK(report.max_residual <= 1e-9);
}

TEST_CASE("adapted program of a tree order has one subformulation per edge") {
    const Instance inst = fixtures::single_edge_on_triangle();
    const auto order = orient_bfs(inst.request, "i");
    const auto labels = confluence_edge_labels(order);
    const auto omega = bag_label_set_ordering(order, labels);
    const LpProgram p = build_adapted(inst, order, labels, omega);
    std::size_t gamma_layers = 0;
    for (const auto& [i, w] : omega.nodes) gamma_layers += w.sets.size();
    CHECK(count_prefix(p, "z[") == 6);
    CHECK(count_prefix(p, "g[") == gamma_layers * 3);
    CHECK(p.variables().size() == 6 + 9 + 6 + 6 + gamma_layers * 3);

    const auto sa = solve_lp(build_mcf(inst));
    const auto sb = solve_lp(p);
    REQUIRE(sa.optimal());
    REQUIRE(sb.optimal());
    CHECK(sa.objective == doctest::Approx(sb.objective).epsilon(1e-9));
}

TEST_CASE("diamond: one subformulation per mapping of the confluence node") {
    const Instance inst = fixtures::diamond_on_triangle();
    const auto order = orient_bfs(inst.request, "r");
    const auto labels = confluence_edge_labels(order);
    const LpProgram p = build_adapted(inst, order, labels, bag_label_set_ordering(order, labels));
    for (const auto& e : inst.request.edges) {
        std::set<std::string> suffixes;
        const std::string prefix = "z[" + edge_name(e) + "@";
        for (const auto& v : p.variables())
            if (v.name.rfind(prefix, 0) == 0) suffixes.insert(v.name.substr(v.name.find('|')));
        CHECK(suffixes == std::set<std::string>{"|t:u]", "|t:v]", "|t:w]"});
    }
}

TEST_CASE("two labels on an edge give nine subformulations on three nodes") {
    const auto order = hypergraph_extraction_order({{{"k", "l"}, {"k"}, {"l"}}});
    const auto labels = confluence_edge_labels(order);
    const auto inst = instance_on_complete_substrate(order.nodes(), [&] {
        std::set<Edge> es;
        for (const auto& [e, r] : order.edges()) es.insert(e);
        return es;
    }());
    const LpProgram p = build_adapted(inst, order, labels, auto_label_set_ordering(order, labels));
    for (const auto& e : order.out_edges(order.root)) {
        if (labels.at(e) != LabelSet{"k", "l"}) continue;
        std::set<std::string> suffixes;
        const std::string prefix = "z[" + edge_name(e) + "@";
        for (const auto& v : p.variables())
            if (v.name.rfind(prefix, 0) == 0) suffixes.insert(v.name.substr(v.name.find('|')));
        CHECK(suffixes.size() == 9);
    }
}

TEST_CASE("invalid orderings and labels are rejected by the builder") {
    const Instance inst = fixtures::diamond_on_triangle();
    const auto order = orient_bfs(inst.request, "r");
    auto labels = confluence_edge_labels(order);
    auto omega = bag_label_set_ordering(order, labels);
    omega.nodes["r"] = make_node_ordering(order, labels, "r", {{}});
    CHECK_THROWS_AS(build_adapted(inst, order, labels, omega), ValidationError);
    labels[{"r", "a"}].clear();
    CHECK_THROWS_AS(build_adapted(inst, order, labels, bag_label_set_ordering(order, labels)), ValidationError);
}

TEST_CASE("lifted random combinations are feasible for every formulation") {
    std::mt19937_64 rng(77);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto request = random_request(seed, 2 + seed % 3, 0.5);
        const auto inst = instance_on_complete_substrate(request.nodes, request.edges);
        const auto order = orient_bfs(request, *request.nodes.begin());
        const auto labels = confluence_edge_labels(order);
        const auto d = random_combination(inst, rng);
        const double cost = combination_cost(inst, d);

        const auto mcf = build_mcf(inst);
        const auto mcf_lift = lift_to_mcf(inst, d);
        CHECK(check_feasible(mcf, mcf_lift, 1e-9).feasible);
        CHECK(objective_value(mcf, mcf_lift) == doctest::Approx(cost));
        for (const auto& omega : {bag_label_set_ordering(order, labels), auto_label_set_ordering(order, labels)}) {
            const auto p = build_adapted(inst, order, labels, omega);
            const auto x = lift_convex_combination(inst, order, labels, omega, d);
            const auto report = check_feasible(p, x, 1e-9);
            CHECK_MESSAGE(report.feasible, "seed " << seed << ": "
                                                   << (report.violated.empty() ? "" : report.violated.front()));
            CHECK(objective_value(p, x) == doctest::Approx(cost));
        }
    }
}

TEST_CASE("a single integral mapping lifts to a 0/1 assignment") {
    const Instance inst = fixtures::diamond_on_triangle();
    const auto order = orient_bfs(inst.request, "r");
    const auto labels = confluence_edge_labels(order);
    const auto omega = bag_label_set_ordering(order, labels);
    Mapping m;
    m.node_map = {{"r", "u"}, {"a", "v"}, {"b", "u"}, {"t", "w"}};
    m.edge_map[{"r", "a"}] = {{"u", "v"}};
    m.edge_map[{"r", "b"}] = {};
    m.edge_map[{"a", "t"}] = {{"v", "w"}};
    m.edge_map[{"b", "t"}] = {{"u", "w"}};
    const auto x = lift_convex_combination(inst, order, labels, omega, {{{1.0, m}}});
    for (const auto& [name, value] : x)
        if (name.rfind("a[", 0) != 0) CHECK_MESSAGE((value == 0.0 || value == 1.0), name);
    CHECK(x.at("z[a->t@v->w|t:w]") == 1.0);
    CHECK(check_feasible(build_adapted(inst, order, labels, omega), x, 1e-12).feasible);
}

TEST_CASE("incomplete combinations cannot be lifted") {
    const Instance inst = fixtures::single_edge_on_triangle();
    ConvexCombination d = fixtures::four_single_edge_mappings();
    d.entries.pop_back();
    CHECK_THROWS(lift_to_mcf(inst, d));
}

TEST_CASE("LP text round trip preserves the program and its optimum") {
    SUBCASE("empty program") {
        const auto text = export_lp(LpProgram{});
        CHECK(text.find("Minimize") != std::string::npos);
        CHECK(text.find("Subject To") != std::string::npos);
        CHECK(text.find("Bounds") != std::string::npos);
        CHECK(text.find("End") != std::string::npos);
        CHECK(parse_lp(text).variables().empty());
    }
    SUBCASE("single-edge MCF") {
        const auto p = build_mcf(fixtures::single_edge_on_triangle());
        const auto q = parse_lp(export_lp(p));
        CHECK(q.variables().size() == p.variables().size());
        CHECK(q.constraints().size() == p.constraints().size());
        const auto sp = solve_lp(p);
        const auto sq = solve_lp(q);
        REQUIRE(sp.optimal());
        REQUIRE(sq.optimal());
        CHECK(std::abs(sp.objective - sq.objective) <= 1e-8);
        CHECK(canonical(q) == canonical(p));
    }
    SUBCASE("diamond adapted program") {
        const Instance inst = fixtures::diamond_on_triangle();
        const auto order = orient_bfs(inst.request, "r");
        const auto labels = confluence_edge_labels(order);
        const auto p = build_adapted(inst, order, labels, auto_label_set_ordering(order, labels));
        const auto q = parse_lp(export_lp(p));
        CHECK(canonical(q) == canonical(p));
        CHECK(export_lp(parse_lp(export_lp(q))) == export_lp(q));
    }
}

TEST_CASE("adapted bag programs and the literal base program share their optimum") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const auto g = random_instance(seed);
        const auto labels = confluence_edge_labels(g.order);
        const auto adapted = solve_lp(build_adapted(g.instance, g.order, labels, bag_label_set_ordering(g.order, labels)));
        const auto literal = solve_lp(oracle::literal_base_program(g.instance, g.order, labels));
        CHECK(adapted.status == literal.status);
        if (adapted.optimal() && literal.optimal())
            CHECK_MESSAGE(std::abs(adapted.objective - literal.objective) <= 1e-6, "seed " << seed);
    }
}

TEST_CASE("program sizes stay within a constant times |G_S|^lw · |G_R|") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const auto g = random_instance(seed);
        const auto labels = confluence_edge_labels(g.order);
        for (const auto& omega : {bag_label_set_ordering(g.order, labels), auto_label_set_ordering(g.order, labels)}) {
            const auto p = build_adapted(g.instance, g.order, labels, omega);
            const double gs = static_cast<double>(g.instance.substrate.nodes.size() + g.instance.substrate.edges.size());
            const double gr = static_cast<double>(g.instance.request.nodes.size() + g.instance.request.edges.size());
            const double bound = std::pow(gs, extraction_label_width(omega)) * gr;
            CHECK(static_cast<double>(p.variables().size()) <= 4.0 * bound);
        }
    }
}
