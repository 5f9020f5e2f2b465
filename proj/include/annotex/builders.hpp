#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "annotex/annotations.hpp"
#include "annotex/graph.hpp"

namespace annotex {

// Binary decision tree, nodes addressed by index. A node with var < 0 is a
// prediction leaf; otherwise it routes on input `var` with `x <= cutoff`
// going left.
struct TreeSpec {
    struct Node {
        int var = -1;
        double cutoff = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
        bool is_leaf() const { return var < 0; }
    };
    std::vector<Node> nodes;
    int root = 0;
    int num_inputs = 0;

    void validate() const;  // throws on malformed specs
    double predict(const std::vector<double>& x) const;  // direct interpreter
};

struct AnnotatedModel {
    ComputationalGraph graph;
    AnnotationBundle bundle;
};

// n inputs feeding one affine output; one leaf per coefficient plus a single
// additive composition verified by exact closed-form extraction.
AnnotatedModel build_linear_regression(const std::vector<double>& coefficients, double intercept);

// Threshold/complement/product encoding with one path annotation per leaf and
// an empirical mutual-exclusivity composition.
AnnotatedModel build_decision_tree(const TreeSpec& spec);

// Fully connected relu network; produces no bundle.
ComputationalGraph build_dense_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed);

// Explicit adjacency; node kinds inferred from degrees, operators supplied.
ComputationalGraph build_sparse_network(const std::vector<Edge>& edges,
                                        const std::map<NodeId, OperatorSpec>& ops);

}  // namespace annotex
