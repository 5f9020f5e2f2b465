#include "annotex/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace annotex {

namespace {

constexpr double kIndicatorEps = 1e-9;

RuntimeError graph_error(const std::string& code, const std::string& msg) {
    return {code, msg};
}

}  // namespace

const char* op_kind_name(OpKind k) {
    switch (k) {
        case OpKind::constant: return "constant";
        case OpKind::identity: return "identity";
        case OpKind::weighted_sum: return "weighted_sum";
        case OpKind::product: return "product";
        case OpKind::affine: return "affine";
        case OpKind::center: return "center";
        case OpKind::indicator: return "indicator";
        case OpKind::threshold: return "threshold";
        case OpKind::relu: return "relu";
        case OpKind::sigmoid: return "sigmoid";
        case OpKind::exponential: return "exp";
        case OpKind::power_base: return "power_base";
        case OpKind::one_minus: return "one_minus";
    }
    return "?";
}

std::optional<OpKind> op_kind_from_name(const std::string& name) {
    static const std::map<std::string, OpKind> table = {
        {"constant", OpKind::constant},   {"identity", OpKind::identity},
        {"weighted_sum", OpKind::weighted_sum}, {"product", OpKind::product},
        {"affine", OpKind::affine},       {"center", OpKind::center},
        {"indicator", OpKind::indicator}, {"threshold", OpKind::threshold},
        {"relu", OpKind::relu},           {"sigmoid", OpKind::sigmoid},
        {"exp", OpKind::exponential},     {"power_base", OpKind::power_base},
        {"one_minus", OpKind::one_minus},
    };
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::input: return "input";
        case NodeKind::compute: return "compute";
        case NodeKind::output: return "output";
    }
    return "?";
}

std::optional<NodeKind> node_kind_from_name(const std::string& name) {
    if (name == "input") return NodeKind::input;
    if (name == "compute") return NodeKind::compute;
    if (name == "output") return NodeKind::output;
    return std::nullopt;
}

OperatorSpec OperatorSpec::constant(double v) {
    OperatorSpec op;
    op.kind = OpKind::constant;
    op.value = v;
    return op;
}
OperatorSpec OperatorSpec::identity() { return {OpKind::identity}; }
OperatorSpec OperatorSpec::weighted_sum() { return {OpKind::weighted_sum}; }
OperatorSpec OperatorSpec::product() { return {OpKind::product}; }
OperatorSpec OperatorSpec::affine(double scale, double offset) {
    OperatorSpec op;
    op.kind = OpKind::affine;
    op.scale = scale;
    op.offset = offset;
    return op;
}
OperatorSpec OperatorSpec::center(double mean) {
    OperatorSpec op;
    op.kind = OpKind::center;
    op.mean = mean;
    return op;
}
OperatorSpec OperatorSpec::indicator(double category) {
    OperatorSpec op;
    op.kind = OpKind::indicator;
    op.category = category;
    return op;
}
OperatorSpec OperatorSpec::threshold(int position, double cutoff, bool less_equal) {
    OperatorSpec op;
    op.kind = OpKind::threshold;
    op.position = position;
    op.cutoff = cutoff;
    op.less_equal = less_equal;
    return op;
}
OperatorSpec OperatorSpec::relu() { return {OpKind::relu}; }
OperatorSpec OperatorSpec::sigmoid() { return {OpKind::sigmoid}; }
OperatorSpec OperatorSpec::exponential() { return {OpKind::exponential}; }
OperatorSpec OperatorSpec::power_base(double base) {
    OperatorSpec op;
    op.kind = OpKind::power_base;
    op.base = base;
    return op;
}
OperatorSpec OperatorSpec::one_minus() { return {OpKind::one_minus}; }

ComputationalGraph::Builder& ComputationalGraph::Builder::input(const NodeId& id) {
    nodes_.push_back({id, NodeKind::input, {}});
    return *this;
}
ComputationalGraph::Builder& ComputationalGraph::Builder::compute(const NodeId& id, OperatorSpec op) {
    nodes_.push_back({id, NodeKind::compute, op});
    return *this;
}
ComputationalGraph::Builder& ComputationalGraph::Builder::output(const NodeId& id, OperatorSpec op) {
    nodes_.push_back({id, NodeKind::output, op});
    return *this;
}
ComputationalGraph::Builder& ComputationalGraph::Builder::edge(const NodeId& from, const NodeId& to,
                                                               double weight) {
    edges_.push_back({from, to, weight});
    return *this;
}

ComputationalGraph ComputationalGraph::Builder::build() const {
    ComputationalGraph g;
    g.nodes_ = nodes_;
    g.edges_ = edges_;
    for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
        const Node& n = g.nodes_[i];
        if (n.id.empty()) throw graph_error("InvalidNodeId", "empty node id");
        if (!g.node_index_.emplace(n.id, i).second)
            throw graph_error("DuplicateNode", "duplicate node id '" + n.id + "'");
        g.in_index_[n.id] = {};
        g.out_index_[n.id] = {};
    }
    for (std::size_t i = 0; i < g.edges_.size(); ++i) {
        const Edge& e = g.edges_[i];
        if (!g.node_index_.count(e.from))
            throw graph_error("DanglingEdge", "edge from unknown node '" + e.from + "'");
        if (!g.node_index_.count(e.to))
            throw graph_error("DanglingEdge", "edge to unknown node '" + e.to + "'");
        if (g.nodes_[g.node_index_[e.to]].kind == NodeKind::input)
            throw graph_error("InputWithIncoming",
                              "input node '" + e.to + "' has an incoming edge");
        if (g.nodes_[g.node_index_[e.from]].kind == NodeKind::output)
            throw graph_error("OutputWithOutgoing",
                              "output node '" + e.from + "' has an outgoing edge");
        if (!g.edge_set_.insert({e.from, e.to}).second)
            throw graph_error("DuplicateEdge", "duplicate edge (" + e.from + ", " + e.to + ")");
        g.out_index_[e.from].push_back(i);
        g.in_index_[e.to].push_back(i);
    }
    for (const Node& n : g.nodes_) {
        if (n.kind == NodeKind::input) continue;
        // Constant nodes carry no data dependencies; everything else needs one.
        if (n.op.kind != OpKind::constant && g.in_index_[n.id].empty())
            throw graph_error("MissingOperatorInput",
                              "non-input node '" + n.id + "' has no incoming edge");
    }

    // Kahn's algorithm over insertion order; failure to drain means a cycle.
    std::map<NodeId, std::size_t> remaining;
    std::deque<NodeId> ready;
    for (const Node& n : g.nodes_) {
        std::size_t deg = g.in_index_[n.id].size();
        remaining[n.id] = deg;
        if (deg == 0) ready.push_back(n.id);
    }
    while (!ready.empty()) {
        NodeId id = ready.front();
        ready.pop_front();
        g.topo_order_.push_back(id);
        for (std::size_t ei : g.out_index_[id]) {
            const NodeId& to = g.edges_[ei].to;
            if (--remaining[to] == 0) ready.push_back(to);
        }
    }
    if (g.topo_order_.size() != g.nodes_.size())
        throw graph_error("CycleDetected", "graph contains a directed cycle");
    return g;
}

bool ComputationalGraph::has_node(const NodeId& id) const { return node_index_.count(id) > 0; }

const Node& ComputationalGraph::node(const NodeId& id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end())
        throw graph_error("UnknownNode", "no node '" + id + "' in graph");
    return nodes_[it->second];
}

bool ComputationalGraph::has_edge(const NodeId& from, const NodeId& to) const {
    return edge_set_.count({from, to}) > 0;
}

double ComputationalGraph::edge_weight(const NodeId& from, const NodeId& to) const {
    for (std::size_t ei : out_edges(from))
        if (edges_[ei].to == to) return edges_[ei].weight;
    throw graph_error("UnknownEdge", "no edge (" + from + ", " + to + ")");
}

const std::vector<std::size_t>& ComputationalGraph::in_edges(const NodeId& id) const {
    auto it = in_index_.find(id);
    if (it == in_index_.end()) throw graph_error("UnknownNode", "no node '" + id + "'");
    return it->second;
}

const std::vector<std::size_t>& ComputationalGraph::out_edges(const NodeId& id) const {
    auto it = out_index_.find(id);
    if (it == out_index_.end()) throw graph_error("UnknownNode", "no node '" + id + "'");
    return it->second;
}

std::vector<NodeId> ComputationalGraph::input_ids() const {
    std::vector<NodeId> out;
    for (const Node& n : nodes_)
        if (n.kind == NodeKind::input) out.push_back(n.id);
    return out;
}

std::vector<NodeId> ComputationalGraph::output_ids() const {
    std::vector<NodeId> out;
    for (const Node& n : nodes_)
        if (n.kind == NodeKind::output) out.push_back(n.id);
    return out;
}

namespace {

double apply_operator(const ComputationalGraph& g, const Node& n, const ActivationMap& acts) {
    const auto& in = g.in_edges(n.id);
    auto weighted_sum = [&] {
        double z = 0.0;
        for (std::size_t ei : in) {
            const Edge& e = g.edges()[ei];
            z += acts.at(e.from) * e.weight;
        }
        return z;
    };
    switch (n.op.kind) {
        case OpKind::constant: return n.op.value;
        case OpKind::identity: return weighted_sum();
        case OpKind::weighted_sum: return weighted_sum();
        case OpKind::product: {
            double p = 1.0;
            for (std::size_t ei : in) p *= acts.at(g.edges()[ei].from);
            return p;
        }
        case OpKind::affine: return n.op.scale * weighted_sum() + n.op.offset;
        case OpKind::center: return weighted_sum() - n.op.mean;
        case OpKind::indicator:
            return std::abs(weighted_sum() - n.op.category) < kIndicatorEps ? 1.0 : 0.0;
        case OpKind::threshold: {
            if (n.op.position < 0 || static_cast<std::size_t>(n.op.position) >= in.size())
                throw RuntimeError("ThresholdPosition",
                                   "threshold position out of range at node '" + n.id + "'");
            double x = acts.at(g.edges()[in[n.op.position]].from);
            bool hit = n.op.less_equal ? (x <= n.op.cutoff) : (x > n.op.cutoff);
            return hit ? 1.0 : 0.0;
        }
        case OpKind::relu: {
            double z = weighted_sum();
            return z > 0.0 ? z : 0.0;
        }
        case OpKind::sigmoid: return 1.0 / (1.0 + std::exp(-weighted_sum()));
        case OpKind::exponential: return std::exp(weighted_sum());
        case OpKind::power_base: return std::pow(n.op.base, weighted_sum());
        case OpKind::one_minus: return 1.0 - weighted_sum();
    }
    throw RuntimeError("BadOperator", "unhandled operator at node '" + n.id + "'");
}

}  // namespace

ActivationMap evaluate(const ComputationalGraph& graph, const ActivationMap& inputs,
                       const EvalOverride& override_fn) {
    for (const auto& [id, _] : inputs) {
        if (!graph.has_node(id) || graph.node(id).kind != NodeKind::input)
            throw RuntimeError("ExtraInput", "'" + id + "' is not an input node");
    }
    ActivationMap acts;
    for (const NodeId& id : graph.topological_order()) {
        const Node& n = graph.node(id);
        double a;
        if (n.kind == NodeKind::input) {
            auto it = inputs.find(id);
            if (it == inputs.end())
                throw RuntimeError("MissingInput", "no value for input node '" + id + "'");
            a = it->second;
        } else {
            a = apply_operator(graph, n, acts);
        }
        if (override_fn) {
            if (auto forced = override_fn(id, acts)) a = *forced;
        }
        if (!std::isfinite(a))
            throw RuntimeError("NonFiniteActivation",
                               "non-finite activation at node '" + id + "'");
        acts[id] = a;
    }
    return acts;
}

ValidityResult validate_subgraph(const ComputationalGraph& graph, const Subgraph& s) {
    ValidityResult r;
    for (const NodeId& id : s.nodes)
        if (!graph.has_node(id))
            throw RuntimeError("UnknownNode", "subgraph references unknown node '" + id + "'");
    auto member = [&](const NodeId& id) { return s.nodes.count(id) > 0; };
    for (const NodeId& id : s.entry)
        if (!member(id)) {
            r.valid = false;
            r.detail = "entry node '" + id + "' not in node set";
            return r;
        }
    for (const NodeId& id : s.exit)
        if (!member(id)) {
            r.valid = false;
            r.detail = "exit node '" + id + "' not in node set";
            return r;
        }
    for (const EdgeRef& e : s.edges) {
        if (!member(e.first) || !member(e.second)) {
            r.valid = false;
            r.detail = "edge (" + e.first + ", " + e.second + ") leaves the node set";
            return r;
        }
        if (!graph.has_edge(e.first, e.second)) {
            r.valid = false;
            r.detail = "edge (" + e.first + ", " + e.second + ") does not exist in the graph";
            return r;
        }
    }

    // Closure: interior nodes keep every host out-edge inside. Entry and exit
    // nodes are exempt; they form the boundary.
    for (const NodeId& id : s.nodes) {
        if (s.entry.count(id) || s.exit.count(id)) continue;
        bool violated = false;
        for (std::size_t ei : graph.out_edges(id)) {
            const Edge& e = graph.edges()[ei];
            if (!s.edges.count({e.from, e.to})) {
                violated = true;
                r.missing_edges.push_back({e.from, e.to});
            }
        }
        if (violated) r.violators.push_back(id);
    }

    // Connectivity: every member lies on some entry->exit path within s.edges.
    std::map<NodeId, std::vector<NodeId>> fwd, bwd;
    for (const EdgeRef& e : s.edges) {
        fwd[e.first].push_back(e.second);
        bwd[e.second].push_back(e.first);
    }
    auto reach = [&](const std::set<NodeId>& seeds, std::map<NodeId, std::vector<NodeId>>& adj) {
        std::set<NodeId> seen(seeds.begin(), seeds.end());
        std::deque<NodeId> q(seeds.begin(), seeds.end());
        while (!q.empty()) {
            NodeId id = q.front();
            q.pop_front();
            for (const NodeId& next : adj[id])
                if (seen.insert(next).second) q.push_back(next);
        }
        return seen;
    };
    std::set<NodeId> from_entry = reach(s.entry, fwd);
    std::set<NodeId> to_exit = reach(s.exit, bwd);
    for (const NodeId& id : s.nodes)
        if (!from_entry.count(id) || !to_exit.count(id)) r.unreachable.push_back(id);

    r.valid = r.violators.empty() && r.unreachable.empty();
    return r;
}

ComputationalGraph split_node(const ComputationalGraph& graph, const NodeId& node,
                              const std::vector<std::set<EdgeRef>>& out_partition) {
    const Node& target = graph.node(node);
    if (target.kind != NodeKind::compute)
        throw RuntimeError("NotComputeNode", "'" + node + "' is not a compute node");
    if (out_partition.size() < 2)
        throw RuntimeError("PartitionTooSmall", "need at least 2 groups to split '" + node + "'");

    std::set<EdgeRef> host_out;
    for (std::size_t ei : graph.out_edges(node)) {
        const Edge& e = graph.edges()[ei];
        host_out.insert({e.from, e.to});
    }
    std::set<EdgeRef> seen;
    for (const auto& group : out_partition) {
        if (group.empty())
            throw RuntimeError("PartitionNotCovering", "empty partition group for '" + node + "'");
        for (const EdgeRef& e : group) {
            if (!host_out.count(e))
                throw RuntimeError("PartitionNotCovering",
                                   "edge (" + e.first + ", " + e.second +
                                       ") is not an out-edge of '" + node + "'");
            if (!seen.insert(e).second)
                throw RuntimeError("PartitionOverlap", "edge (" + e.first + ", " + e.second +
                                                           ") appears in two groups");
        }
    }
    if (seen.size() != host_out.size())
        throw RuntimeError("PartitionNotCovering",
                           "partition does not cover all out-edges of '" + node + "'");

    auto clone_id = [&](std::size_t i) { return node + "#" + std::to_string(i + 1); };
    auto group_of = [&](const EdgeRef& e) -> std::size_t {
        for (std::size_t i = 0; i < out_partition.size(); ++i)
            if (out_partition[i].count(e)) return i;
        return 0;  // unreachable, partition covers
    };

    ComputationalGraph::Builder b;
    for (const Node& n : graph.nodes()) {
        if (n.id == node) {
            for (std::size_t i = 0; i < out_partition.size(); ++i)
                b.compute(clone_id(i), n.op);
        } else if (n.kind == NodeKind::input) {
            b.input(n.id);
        } else if (n.kind == NodeKind::output) {
            b.output(n.id, n.op);
        } else {
            b.compute(n.id, n.op);
        }
    }
    for (const Edge& e : graph.edges()) {
        if (e.from == node) {
            b.edge(clone_id(group_of({e.from, e.to})), e.to, e.weight);
        } else if (e.to == node) {
            for (std::size_t i = 0; i < out_partition.size(); ++i)
                b.edge(e.from, clone_id(i), e.weight);
        } else {
            b.edge(e.from, e.to, e.weight);
        }
    }
    return b.build();
}

Metrics graph_metrics(const ComputationalGraph& graph) {
    Metrics m;
    m.num_nodes = graph.nodes().size();
    m.num_edges = graph.edges().size();
    m.log2_subgraph_space = static_cast<double>(m.num_edges);
    double log10_space = static_cast<double>(m.num_edges) * std::log10(2.0);
    m.magnitude_exponent = static_cast<int>(std::floor(log10_space));
    m.magnitude_mantissa = std::pow(10.0, log10_space - m.magnitude_exponent);
    for (const Node& n : graph.nodes())
        m.max_fan_out = std::max(m.max_fan_out, graph.out_edges(n.id).size());
    if (m.num_nodes > 1)
        m.density = static_cast<double>(m.num_edges) /
                    (static_cast<double>(m.num_nodes) * (m.num_nodes - 1));
    return m;
}

}  // namespace annotex
