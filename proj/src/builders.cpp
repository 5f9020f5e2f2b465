#include "annotex/builders.hpp"

#include <random>
#include <set>
#include <string>

namespace annotex {

namespace {

std::string idx(const std::string& prefix, int i) { return prefix + std::to_string(i); }

}  // namespace

void TreeSpec::validate() const {
    if (nodes.empty()) throw RuntimeError("MalformedTree", "tree has no nodes");
    if (num_inputs < 1) throw RuntimeError("MalformedTree", "tree needs at least one input");
    if (root < 0 || root >= static_cast<int>(nodes.size()))
        throw RuntimeError("MalformedTree", "root index out of range");
    std::set<int> reachable;
    std::vector<int> stack{root};
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        if (i < 0 || i >= static_cast<int>(nodes.size()))
            throw RuntimeError("MalformedTree", "child index out of range");
        if (!reachable.insert(i).second)
            throw RuntimeError("MalformedTree", "node " + std::to_string(i) + " reached twice");
        const Node& n = nodes[i];
        if (n.is_leaf()) continue;
        if (n.var >= num_inputs)
            throw RuntimeError("MalformedTree", "predicate variable out of range");
        if (n.left < 0 || n.right < 0)
            throw RuntimeError("MalformedTree", "internal node " + std::to_string(i) +
                                                    " is not binary");
        stack.push_back(n.left);
        stack.push_back(n.right);
    }
    if (reachable.size() != nodes.size())
        throw RuntimeError("MalformedTree", "tree contains unreachable nodes");
}

double TreeSpec::predict(const std::vector<double>& x) const {
    int i = root;
    while (!nodes[i].is_leaf())
        i = x[nodes[i].var] <= nodes[i].cutoff ? nodes[i].left : nodes[i].right;
    return nodes[i].value;
}

AnnotatedModel build_linear_regression(const std::vector<double>& coefficients, double intercept) {
    if (coefficients.empty())
        throw RuntimeError("BadSpec", "regression needs at least one coefficient");
    ComputationalGraph::Builder b;
    std::size_t n = coefficients.size();
    for (std::size_t i = 0; i < n; ++i) b.input(idx("x", static_cast<int>(i) + 1));
    b.output("y", OperatorSpec::affine(1.0, intercept));
    for (std::size_t i = 0; i < n; ++i)
        b.edge(idx("x", static_cast<int>(i) + 1), "y", coefficients[i]);

    AnnotatedModel m{b.build(), {}};
    m.bundle.context = {"academics in computational areas with predictive-model experience",
                        "English", "model transparency review"};

    Subgraph whole;
    whole.exit = {"y"};
    whole.nodes = {"y"};
    EvidenceCheck affine_check;
    affine_check.id = "C.affine";
    affine_check.kind = CheckKind::closed_form_affine;
    affine_check.mode = CheckMode::analytical;
    affine_check.expected_offset = intercept;

    for (std::size_t i = 0; i < n; ++i) {
        std::string x = idx("x", static_cast<int>(i) + 1);
        whole.entry.insert(x);
        whole.nodes.insert(x);
        whole.edges.insert({x, "y"});
        affine_check.expected[x] = coefficients[i];

        LeafAnnotation a;
        a.id = idx("A", static_cast<int>(i) + 1);
        a.subgraph.entry = {x};
        a.subgraph.exit = {"y"};
        a.subgraph.nodes = {x, "y"};
        a.subgraph.edges = {{x, "y"}};
        a.hypothesis = "Feature " + x + " contributes " + std::to_string(coefficients[i]) +
                       " to y per unit change.";
        EvidenceCheck c;
        c.id = a.id + ".coef";
        c.kind = CheckKind::coefficient_equals;
        c.mode = CheckMode::analytical;
        c.target.edge = EdgeRef{x, "y"};
        c.expected["value"] = coefficients[i];
        a.evidence.push_back(c);
        m.bundle.leaves.push_back(std::move(a));
    }
    affine_check.target.subgraph = whole;

    CompositionAnnotation root;
    root.id = "C_additive";
    root.junction.entry = {"y"};
    root.junction.exit = {"y"};
    root.junction.nodes = {"y"};
    root.hypothesis = "All features combine additively: y is the weighted sum of the inputs "
                      "plus the intercept.";
    root.evidence.push_back(affine_check);
    for (const LeafAnnotation& a : m.bundle.leaves) root.children.push_back(a.id);
    m.bundle.compositions.push_back(std::move(root));
    m.bundle.root = "C_additive";
    return m;
}

AnnotatedModel build_decision_tree(const TreeSpec& spec) {
    spec.validate();

    ComputationalGraph::Builder b;
    for (int i = 0; i < spec.num_inputs; ++i) b.input(idx("x", i));

    // One threshold node per predicate; a one_minus complement per predicate
    // whose right branch is taken by some path; a product gate per leaf.
    std::set<int> needs_complement;
    std::vector<int> leaf_order;
    {
        std::vector<int> stack{spec.root};
        while (!stack.empty()) {
            int i = stack.back();
            stack.pop_back();
            const TreeSpec::Node& n = spec.nodes[i];
            if (n.is_leaf()) {
                leaf_order.push_back(i);
                continue;
            }
            needs_complement.insert(i);
            stack.push_back(n.right);
            stack.push_back(n.left);
        }
    }
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const TreeSpec::Node& n = spec.nodes[i];
        if (n.is_leaf()) continue;
        b.compute(idx("t", static_cast<int>(i)),
                  OperatorSpec::threshold(0, n.cutoff, /*less_equal=*/true));
        b.compute(idx("nt", static_cast<int>(i)), OperatorSpec::one_minus());
    }
    for (int leaf : leaf_order) b.compute(idx("p", leaf), OperatorSpec::product());
    b.output("y", OperatorSpec::weighted_sum());

    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const TreeSpec::Node& n = spec.nodes[i];
        if (n.is_leaf()) continue;
        b.edge(idx("x", n.var), idx("t", static_cast<int>(i)));
        b.edge(idx("t", static_cast<int>(i)), idx("nt", static_cast<int>(i)));
    }

    // Path wiring: each leaf's gate multiplies the conditions along its path.
    struct PathStep {
        int node;
        bool left;
    };
    std::map<int, std::vector<PathStep>> paths;
    {
        std::vector<std::pair<int, std::vector<PathStep>>> stack{{spec.root, {}}};
        while (!stack.empty()) {
            auto [i, path] = stack.back();
            stack.pop_back();
            const TreeSpec::Node& n = spec.nodes[i];
            if (n.is_leaf()) {
                paths[i] = path;
                continue;
            }
            auto left = path, right = path;
            left.push_back({i, true});
            right.push_back({i, false});
            stack.push_back({n.right, std::move(right)});
            stack.push_back({n.left, std::move(left)});
        }
    }
    for (int leaf : leaf_order) {
        for (const PathStep& s : paths[leaf])
            b.edge(s.left ? idx("t", s.node) : idx("nt", s.node), idx("p", leaf));
        b.edge(idx("p", leaf), "y", spec.nodes[leaf].value);
    }

    AnnotatedModel m{b.build(), {}};
    m.bundle.context = {"academics in computational areas with predictive-model experience",
                        "English", "model transparency review"};

    std::vector<NodeId> gates;
    for (int leaf : leaf_order) gates.push_back(idx("p", leaf));

    for (int leaf : leaf_order) {
        LeafAnnotation a;
        a.id = "path_" + std::to_string(leaf);
        Subgraph& s = a.subgraph;
        s.exit = {"y"};
        s.nodes = {"y", idx("p", leaf)};
        s.edges.insert({idx("p", leaf), "y"});
        std::string condition;
        for (const PathStep& st : paths[leaf]) {
            const TreeSpec::Node& n = spec.nodes[st.node];
            std::string x = idx("x", n.var);
            std::string t = idx("t", st.node);
            s.entry.insert(x);
            s.nodes.insert(x);
            s.nodes.insert(t);
            // Conditions fan out to other paths; keep them on the boundary.
            s.exit.insert(t);
            s.edges.insert({x, t});
            if (st.left) {
                s.edges.insert({t, idx("p", leaf)});
            } else {
                std::string nt = idx("nt", st.node);
                s.nodes.insert(nt);
                s.exit.insert(nt);
                s.edges.insert({t, nt});
                s.edges.insert({nt, idx("p", leaf)});
            }
            if (!condition.empty()) condition += " and ";
            condition += x + (st.left ? " <= " : " > ") + std::to_string(n.cutoff);
        }
        if (condition.empty()) condition = "always";
        a.hypothesis = "If " + condition + " then predict " +
                       std::to_string(spec.nodes[leaf].value) + ".";
        EvidenceCheck c;
        c.id = a.id + ".gate";
        c.kind = CheckKind::mutual_exclusivity;
        c.mode = CheckMode::empirical;
        c.target.node_list = {idx("p", leaf)};
        // The gate itself is 0/1; exclusivity across gates is the
        // composition's claim. Here we just check the gate is boolean by
        // construction via the composition's shared check below.
        c.target.node_list = gates;
        c.samples = 64;
        c.seed = 7 + static_cast<std::uint64_t>(leaf);
        for (int i = 0; i < spec.num_inputs; ++i)
            c.inputs.push_back({idx("x", i), -10.0, 10.0, {}});
        a.evidence.push_back(std::move(c));
        m.bundle.leaves.push_back(std::move(a));
    }

    CompositionAnnotation root;
    root.id = "C_paths";
    root.junction.entry = {"y"};
    root.junction.exit = {"y"};
    root.junction.nodes = {"y"};
    root.hypothesis = "Exactly one path matches any input; the prediction is that path's "
                      "leaf value.";
    EvidenceCheck excl;
    excl.id = "C_paths.exclusive";
    excl.kind = CheckKind::mutual_exclusivity;
    excl.mode = CheckMode::empirical;
    excl.target.node_list = gates;
    excl.samples = 1000;
    excl.seed = 42;
    for (int i = 0; i < spec.num_inputs; ++i)
        excl.inputs.push_back({idx("x", i), -10.0, 10.0, {}});
    root.evidence.push_back(std::move(excl));
    for (const LeafAnnotation& a : m.bundle.leaves) root.children.push_back(a.id);
    m.bundle.compositions.push_back(std::move(root));
    m.bundle.root = "C_paths";
    return m;
}

ComputationalGraph build_dense_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2)
        throw RuntimeError("BadSpec", "an MLP needs at least two layers");
    for (int s : layer_sizes)
        if (s < 1) throw RuntimeError("BadSpec", "layer sizes must be positive");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> weight(-1.0, 1.0);

    auto name = [&](std::size_t layer, int i) {
        if (layer == 0) return idx("in", i);
        if (layer == layer_sizes.size() - 1) return idx("out", i);
        return "h" + std::to_string(layer) + "_" + std::to_string(i);
    };

    ComputationalGraph::Builder b;
    for (int i = 0; i < layer_sizes[0]; ++i) b.input(name(0, i));
    for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
        bool last = l == layer_sizes.size() - 1;
        for (int i = 0; i < layer_sizes[l]; ++i) {
            if (last) b.output(name(l, i), OperatorSpec::weighted_sum());
            else b.compute(name(l, i), OperatorSpec::relu());
        }
    }
    for (std::size_t l = 1; l < layer_sizes.size(); ++l)
        for (int i = 0; i < layer_sizes[l]; ++i)
            for (int j = 0; j < layer_sizes[l - 1]; ++j)
                b.edge(name(l - 1, j), name(l, i), weight(rng));
    return b.build();
}

ComputationalGraph build_sparse_network(const std::vector<Edge>& edges,
                                        const std::map<NodeId, OperatorSpec>& ops) {
    std::set<NodeId> all, has_in, has_out;
    for (const Edge& e : edges) {
        all.insert(e.from);
        all.insert(e.to);
        has_out.insert(e.from);
        has_in.insert(e.to);
    }
    for (const auto& [id, _] : ops) all.insert(id);

    ComputationalGraph::Builder b;
    for (const NodeId& id : all) {
        if (!has_in.count(id) && !ops.count(id)) {
            b.input(id);
        } else {
            auto it = ops.find(id);
            if (it == ops.end())
                throw RuntimeError("MissingOperator", "no operator for node '" + id + "'");
            if (has_out.count(id)) b.compute(id, it->second);
            else b.output(id, it->second);
        }
    }
    for (const Edge& e : edges) b.edge(e.from, e.to, e.weight);
    return b.build();
}

}  // namespace annotex
