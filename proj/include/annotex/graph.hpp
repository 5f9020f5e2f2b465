#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "annotex/errors.hpp"

namespace annotex {

using NodeId = std::string;

enum class NodeKind { input, compute, output };

enum class OpKind {
    constant,
    identity,
    weighted_sum,
    product,
    affine,
    center,
    indicator,
    threshold,
    relu,
    sigmoid,
    exponential,
    power_base,
    one_minus,
};

const char* op_kind_name(OpKind k);
std::optional<OpKind> op_kind_from_name(const std::string& name);
const char* node_kind_name(NodeKind k);
std::optional<NodeKind> node_kind_from_name(const std::string& name);

// Operator attached to a compute/output node. Unary transforms (identity,
// affine, center, relu, sigmoid, exponential, power_base, one_minus) apply to
// the weighted sum of incoming activations; product multiplies raw incoming
// activations; threshold selects one incoming activation by position.
struct OperatorSpec {
    OpKind kind = OpKind::identity;
    double value = 0.0;       // constant
    double scale = 1.0;       // affine
    double offset = 0.0;      // affine
    double mean = 0.0;        // center
    double category = 0.0;    // indicator
    int position = 0;         // threshold: index into incoming edges
    double cutoff = 0.0;      // threshold
    bool less_equal = true;   // threshold: true means (x <= cutoff) -> 1
    double base = 1.0;        // power_base

    static OperatorSpec constant(double v);
    static OperatorSpec identity();
    static OperatorSpec weighted_sum();
    static OperatorSpec product();
    static OperatorSpec affine(double scale, double offset);
    static OperatorSpec center(double mean);
    static OperatorSpec indicator(double category);
    static OperatorSpec threshold(int position, double cutoff, bool less_equal);
    static OperatorSpec relu();
    static OperatorSpec sigmoid();
    static OperatorSpec exponential();
    static OperatorSpec power_base(double base);
    static OperatorSpec one_minus();
};

struct Node {
    NodeId id;
    NodeKind kind = NodeKind::compute;
    OperatorSpec op;
};

struct Edge {
    NodeId from;
    NodeId to;
    double weight = 1.0;
};

using EdgeRef = std::pair<NodeId, NodeId>;

// Immutable after build(). Node and edge order is insertion order, which all
// traversals and serializations respect for determinism.
class ComputationalGraph {
public:
    class Builder {
    public:
        Builder& input(const NodeId& id);
        Builder& compute(const NodeId& id, OperatorSpec op);
        Builder& output(const NodeId& id, OperatorSpec op);
        Builder& edge(const NodeId& from, const NodeId& to, double weight = 1.0);
        ComputationalGraph build() const;

    private:
        std::vector<Node> nodes_;
        std::vector<Edge> edges_;
    };

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<NodeId>& topological_order() const { return topo_order_; }

    bool has_node(const NodeId& id) const;
    const Node& node(const NodeId& id) const;
    bool has_edge(const NodeId& from, const NodeId& to) const;
    double edge_weight(const NodeId& from, const NodeId& to) const;

    // Incoming/outgoing edge indices into edges(), in insertion order.
    const std::vector<std::size_t>& in_edges(const NodeId& id) const;
    const std::vector<std::size_t>& out_edges(const NodeId& id) const;

    std::vector<NodeId> input_ids() const;
    std::vector<NodeId> output_ids() const;

private:
    friend class Builder;
    ComputationalGraph() = default;

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::map<NodeId, std::size_t> node_index_;
    std::map<NodeId, std::vector<std::size_t>> in_index_;
    std::map<NodeId, std::vector<std::size_t>> out_index_;
    std::set<EdgeRef> edge_set_;
    std::vector<NodeId> topo_order_;
};

using ActivationMap = std::map<NodeId, double>;

// Optional intervention applied during evaluation: called after a node's
// activation is computed; returning a value replaces it before downstream
// nodes read it. Used for ablation and substitution checks.
using EvalOverride = std::function<std::optional<double>(const NodeId&, const ActivationMap&)>;

ActivationMap evaluate(const ComputationalGraph& graph, const ActivationMap& inputs,
                       const EvalOverride& override_fn = nullptr);

struct Subgraph {
    std::set<NodeId> entry;
    std::set<NodeId> exit;
    std::set<NodeId> nodes;
    std::set<EdgeRef> edges;
};

struct ValidityResult {
    bool valid = true;
    std::vector<NodeId> violators;         // interior nodes with external out-edges
    std::vector<EdgeRef> missing_edges;    // the host out-edges they lack
    std::vector<NodeId> unreachable;       // members on no entry->exit path
    std::string detail;
};

// Interior nodes (neither entry nor exit) must keep all host out-edges inside
// the subgraph, and every member must lie on some entry->exit path.
ValidityResult validate_subgraph(const ComputationalGraph& graph, const Subgraph& s);

// Replaces `node` with one clone per out-edge group (ids `<node>#1`, ...).
// Clones share incoming edges and operator; evaluation is unchanged.
ComputationalGraph split_node(const ComputationalGraph& graph, const NodeId& node,
                              const std::vector<std::set<EdgeRef>>& out_partition);

struct Metrics {
    std::size_t num_nodes = 0;
    std::size_t num_edges = 0;
    double log2_subgraph_space = 0.0;  // log2 of 2^|E| candidate subgraphs
    int magnitude_exponent = 0;        // floor(log10(2^|E|))
    double magnitude_mantissa = 0.0;   // 2^|E| ~= mantissa * 10^exponent
    std::size_t max_fan_out = 0;
    double density = 0.0;              // |E| / (|V| * (|V|-1))
};

Metrics graph_metrics(const ComputationalGraph& graph);

}  // namespace annotex
