// Extraction orders and confluence edge labels.
#include <doctest.h>

#include "fixtures.hpp"
#include "oracles/oracles.hpp"
#include "vnep/error.hpp"
#include "vnep/generators.hpp"

using namespace vnep;

namespace {

RequestGraph undirected(const std::vector<Edge>& edges) {
    std::set<NodeId> nodes;
    std::set<Edge> es(edges.begin(), edges.end());
    for (const auto& [a, b] : edges) nodes.insert({a, b});
    return instance_on_complete_substrate(nodes, es).request;
}

std::set<Edge> edge_set(const OrientedGraph& g) {
    std::set<Edge> out;
    for (const auto& [e, reversed] : g.edges()) out.insert(e);
    return out;
}

ExtractionOrder diamond_order() {
    return orient_bfs(fixtures::diamond_on_triangle().request, "r");
}

}  // namespace

TEST_CASE("BFS orientation of a path and a triangle") {
    const auto path = orient_bfs(undirected({{"a", "b"}, {"b", "c"}}), "a");
    CHECK(edge_set(path) == std::set<Edge>{{"a", "b"}, {"b", "c"}});
    const auto tri = orient_bfs(undirected({{"a", "b"}, {"b", "c"}, {"a", "c"}}), "a");
    CHECK(edge_set(tri) == std::set<Edge>{{"a", "b"}, {"a", "c"}, {"b", "c"}});
}

TEST_CASE("BFS orientation records reversed request edges") {
    const auto order = orient_bfs(undirected({{"a", "b"}, {"c", "b"}}), "a");
    CHECK(order.has_edge({"b", "c"}));
    CHECK(order.is_reversed({"b", "c"}));
    CHECK(order.original({"b", "c"}) == Edge{"c", "b"});
}

TEST_CASE("BFS orientations are acyclic and rooted on random connected requests") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto request = random_request(seed, 2 + seed % 7, 0.4);
        for (const auto& root : request.nodes) {
            const auto order = orient_bfs(request, root);
            CHECK(order.is_acyclic());
            CHECK(order.reachable_from(root) == request.nodes);
            CHECK(order.edges().size() == request.edges.size());
            CHECK_NOTHROW(validate_order(order));
        }
    }
}

TEST_CASE("orders that are cyclic or not rooted are rejected") {
    const auto request = undirected({{"a", "b"}, {"b", "c"}, {"a", "c"}});
    CHECK_THROWS_AS(make_order(request, "a", {{"a", "b"}, {"b", "c"}, {"c", "a"}}), ValidationError);
    CHECK_THROWS_AS(make_order(request, "a", {{"a", "b"}, {"c", "b"}, {"c", "a"}}), ValidationError);
    CHECK_NOTHROW(make_order(request, "c", {{"c", "b"}, {"b", "a"}, {"c", "a"}}));
}

TEST_CASE("tree orders carry no labels") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = random_tree(seed, 2 + seed % 7);
        for (const auto& [e, labels] : confluence_edge_labels(g.order)) CHECK(labels.empty());
    }
}

TEST_CASE("diamond: every edge lies on the confluence into t") {
    const auto labels = confluence_edge_labels(diamond_order());
    REQUIRE(labels.size() == 4);
    for (const auto& [e, l] : labels) CHECK(l == LabelSet{"t"});
}

TEST_CASE("half-wheel with odd sinks: spoke labels alternate between one and two rim nodes") {
    HalfWheelSpec spec;
    spec.sinks = SinkParity::Odd;
    const auto g = half_wheel(spec);
    const auto labels = confluence_edge_labels(g.order);
    for (int i = 1; i <= 9; ++i) {
        const NodeId wi = "w" + std::to_string(i);
        LabelSet expected;
        if (i % 2 == 1) {
            expected = {wi};
        } else {
            expected = {"w" + std::to_string(i - 1), "w" + std::to_string(i + 1)};
        }
        CHECK_MESSAGE(labels.at({"wc", wi}) == expected, wi);
    }
}

TEST_CASE("confluence labels agree with pair-of-paths enumeration") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        const auto request = random_request(seed, 3 + seed % 6, 0.45);
        const auto order = orient_bfs(request, *request.nodes.begin());
        CHECK(confluence_edge_labels(order) == oracle::brute_force_confluence_labels(order));
        ++checked;
    }
    const auto hw = half_wheel({});
    CHECK(confluence_edge_labels(hw.order) == oracle::brute_force_confluence_labels(hw.order));
    CHECK(checked == 120);
}

TEST_CASE("confluence labels: equal in-edge labels, and labels are exactly the merge nodes") {
    for (std::uint64_t seed = 0; seed < 80; ++seed) {
        const auto request = random_request(seed, 3 + seed % 6, 0.5);
        const auto order = orient_bfs(request, *request.nodes.begin());
        const auto labels = confluence_edge_labels(order);
        std::set<NodeId> used;
        for (const auto& [e, l] : labels) used.insert(l.begin(), l.end());
        for (const auto& i : order.nodes()) {
            const auto& in = order.in_edges(i);
            for (const auto& e : in) CHECK(labels.at(e) == labels.at(in.front()));
            const bool merge = in.size() >= 2;
            CHECK(used.count(i) == (merge ? 1u : 0u));
            if (merge)
                for (const auto& e : in) CHECK(labels.at(e).count(i));
        }
        CHECK(check_decomposable_labels(order, labels).passed());
    }
}

TEST_CASE("decomposability checker flags each broken property") {
    const auto order = diamond_order();
    auto labels = confluence_edge_labels(order);
    CHECK(check_decomposable_labels(order, labels).passed());

    SUBCASE("dropping a confluence label breaks the extension property") {
        labels[{"r", "a"}].clear();
        const auto report = check_decomposable_labels(order, labels);
        CHECK_FALSE(report.passed());
        CHECK_FALSE(report.property[0]);
    }
    SUBCASE("labelling an out-edge of k with k") {
        auto b = fixtures::triangle_substrate();
        b.node("r").node("a").node("b").node("t").node("z");
        b.edge("r", "a").edge("r", "b").edge("a", "t").edge("b", "t").edge("t", "z");
        const auto o = orient_bfs(b.build().request, "r");
        auto l = confluence_edge_labels(o);
        l[{"t", "z"}] = {"t"};
        const auto report = check_decomposable_labels(o, l);
        CHECK_FALSE(report.passed());
        CHECK_FALSE(report.property[4]);
    }
}

TEST_CASE("label-induced subgraphs") {
    const auto order = diamond_order();
    const auto labels = confluence_edge_labels(order);
    const auto sub = label_induced_subgraph(order, labels, "t");
    CHECK(sub.nodes == std::set<NodeId>{"r", "a", "b", "t"});
    CHECK(sub.edges.size() == 4);
    REQUIRE(sub.root.has_value());
    CHECK(*sub.root == "r");
    CHECK_THROWS(label_induced_subgraph(order, labels, "a"));

    SUBCASE("single labeled edge") {
        EdgeLabelAssignment one = labels;
        for (auto& [e, l] : one) l.clear();
        one[{"a", "t"}] = {"t"};
        const auto s = label_induced_subgraph(order, one, "t");
        CHECK(s.edges == std::set<Edge>{{"a", "t"}});
        CHECK(s.root == std::optional<NodeId>("a"));
    }
    SUBCASE("two disjoint labeled components have no root") {
        EdgeLabelAssignment two = labels;
        for (auto& [e, l] : two) l.clear();
        two[{"r", "a"}] = {"t"};
        two[{"b", "t"}] = {"t"};
        CHECK_FALSE(label_induced_subgraph(order, two, "t").root.has_value());
    }
}

TEST_CASE("order documents round-trip") {
    const auto hw = half_wheel({});
    const auto labels = confluence_edge_labels(hw.order);
    const auto doc = order_to_json(hw.order, &labels);
    const auto again = order_from_json(doc, hw.instance.request);
    CHECK(again.root == hw.order.root);
    CHECK(again.edges() == hw.order.edges());
    CHECK_THROWS_AS(order_from_json({{"root", "wc"}, {"edges", nlohmann::json::array()}}, hw.instance.request),
                    ValidationError);
}
