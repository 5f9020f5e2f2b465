#include <functional>
#include <random>

#include "annotex/builders.hpp"
#include "annotex/evidence.hpp"
#include "doctest.h"

using namespace annotex;

TEST_CASE("linear regression builder matches a dot-product oracle") {
    std::vector<double> coef = {2.0, 3.0, -0.5, 10.0};
    AnnotatedModel m = build_linear_regression(coef, 1.25);
    CHECK(m.graph.nodes().size() == coef.size() + 1);
    CHECK(m.graph.edges().size() == coef.size());

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-4.0, 4.0);
    for (int t = 0; t < 50; ++t) {
        ActivationMap in;
        double want = 1.25;
        for (std::size_t i = 0; i < coef.size(); ++i) {
            double x = d(rng);
            in["x" + std::to_string(i + 1)] = x;
            want += coef[i] * x;
        }
        CHECK(evaluate(m.graph, in).at("y") == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("linear regression bundle verifies end to end") {
    AnnotatedModel m = build_linear_regression({2.0, 3.0}, 1.0);
    validate_bundle(m.graph, m.bundle);
    auto results = verify_bundle(m.graph, m.bundle);
    for (const auto& [id, r] : results) {
        INFO(id << ": " << r.diagnostics);
        CHECK(r.status == CheckStatus::pass);
    }
    CHECK(explainability_criterion(m.graph, m.bundle, results).explainable);
}

TEST_CASE("tree spec validation catches malformed trees") {
    TreeSpec t;
    t.num_inputs = 1;
    t.nodes = {{0, 0.5, 1, 2, 0.0}, {-1, 0, -1, -1, 1.0}, {-1, 0, -1, -1, 2.0}};
    CHECK_NOTHROW(t.validate());

    TreeSpec bad_var = t;
    bad_var.nodes[0].var = 3;
    CHECK_THROWS_AS(bad_var.validate(), RuntimeError);

    TreeSpec shared = t;
    shared.nodes[0].right = 1;  // node 1 reached twice
    CHECK_THROWS_AS(shared.validate(), RuntimeError);

    TreeSpec dangling = t;
    dangling.nodes[0].left = 9;
    CHECK_THROWS_AS(dangling.validate(), RuntimeError);
}

TEST_CASE("decision tree graph equals the direct interpreter") {
    TreeSpec t;
    t.num_inputs = 2;
    t.root = 0;
    t.nodes = {
        {0, 1.5, 1, 2, 0.0},    // x0 <= 1.5 ?
        {-1, 0, -1, -1, 3.0},   // leaf
        {1, 0.0, 3, 4, 0.0},    // x1 <= 0 ?
        {-1, 0, -1, -1, -1.0},  // leaf
        {-1, 0, -1, -1, 7.0},   // leaf
    };
    AnnotatedModel m = build_decision_tree(t);

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> d(-10.0, 10.0);
    for (int s = 0; s < 200; ++s) {
        std::vector<double> x = {d(rng), d(rng)};
        ActivationMap in = {{"x0", x[0]}, {"x1", x[1]}};
        CHECK(evaluate(m.graph, in).at("y") == t.predict(x));
    }
}

TEST_CASE("random decision trees: one gate fires and the bundle verifies") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 5; ++trial) {
        // Grow a random binary tree of depth <= 6.
        TreeSpec t;
        t.num_inputs = 3;
        std::uniform_real_distribution<double> cut(-5.0, 5.0);
        std::uniform_int_distribution<int> var(0, 2);
        std::uniform_real_distribution<double> val(-9.0, 9.0);
        std::function<int(int)> grow = [&](int depth) {
            TreeSpec::Node n;
            bool leaf = depth >= 6 || (depth > 0 && rng() % 3 == 0);
            int idx = static_cast<int>(t.nodes.size());
            t.nodes.push_back(n);
            if (leaf) {
                t.nodes[idx].value = val(rng);
            } else {
                t.nodes[idx].var = var(rng);
                t.nodes[idx].cutoff = cut(rng);
                int l = grow(depth + 1);
                int r = grow(depth + 1);
                t.nodes[idx].left = l;
                t.nodes[idx].right = r;
            }
            return idx;
        };
        grow(0);
        t.validate();

        AnnotatedModel m = build_decision_tree(t);
        validate_bundle(m.graph, m.bundle);

        // Collect the per-path product gates.
        std::vector<NodeId> gates;
        for (const Node& n : m.graph.nodes())
            if (n.id.rfind("p", 0) == 0 && n.op.kind == OpKind::product) gates.push_back(n.id);

        std::uniform_real_distribution<double> d(-10.0, 10.0);
        for (int s = 0; s < 200; ++s) {
            std::vector<double> x = {d(rng), d(rng), d(rng)};
            ActivationMap in;
            for (int i = 0; i < 3; ++i) in["x" + std::to_string(i)] = x[i];
            ActivationMap acts = evaluate(m.graph, in);
            int fired = 0;
            for (const NodeId& gate : gates)
                if (acts.at(gate) == 1.0) ++fired;
            CHECK(fired == 1);
            CHECK(acts.at("y") == t.predict(x));
        }
    }
}

TEST_CASE("dense mlp builder: sizes, determinism, evaluation") {
    ComputationalGraph a = build_dense_mlp({4, 16, 16, 1}, 7);
    Metrics m = graph_metrics(a);
    CHECK(m.num_nodes == 37);
    CHECK(m.num_edges == 336);
    CHECK(m.log2_subgraph_space == 336.0);
    CHECK(m.magnitude_exponent == 101);

    ComputationalGraph b = build_dense_mlp({4, 16, 16, 1}, 7);
    for (std::size_t i = 0; i < a.edges().size(); ++i)
        CHECK(a.edges()[i].weight == b.edges()[i].weight);

    ComputationalGraph c = build_dense_mlp({4, 16, 16, 1}, 8);
    bool any_different = false;
    for (std::size_t i = 0; i < a.edges().size(); ++i)
        if (a.edges()[i].weight != c.edges()[i].weight) any_different = true;
    CHECK(any_different);

    ActivationMap in = {{"in0", 0.3}, {"in1", -0.7}, {"in2", 1.1}, {"in3", 0.0}};
    CHECK_NOTHROW(evaluate(a, in));
}

TEST_CASE("sparse network builder infers node kinds from degrees") {
    std::vector<Edge> edges = {{"a", "h", 1.0}, {"b", "h", 1.0}, {"h", "o", 2.0}};
    std::map<NodeId, OperatorSpec> ops = {{"h", OperatorSpec::relu()},
                                          {"o", OperatorSpec::identity()}};
    ComputationalGraph g = build_sparse_network(edges, ops);
    CHECK(g.node("a").kind == NodeKind::input);
    CHECK(g.node("h").kind == NodeKind::compute);
    CHECK(g.node("o").kind == NodeKind::output);
    CHECK(evaluate(g, {{"a", 2.0}, {"b", -1.0}}).at("o") == 2.0);

    CHECK_THROWS_AS(build_sparse_network(edges, {}), RuntimeError);
}
