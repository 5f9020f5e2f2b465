#include "annotex/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "annotex/annotations.hpp"

namespace annotex {

namespace {

constexpr double kIndicatorTol = 1e-9;

std::vector<NodeId> restricted_topo_order(const ComputationalGraph& g, const Subgraph& s) {
    std::vector<NodeId> order;
    for (const NodeId& id : g.topological_order())
        if (s.nodes.count(id)) order.push_back(id);
    return order;
}

std::vector<const Edge*> in_edges_within(const ComputationalGraph& g, const Subgraph& s,
                                         const NodeId& id) {
    std::vector<const Edge*> in;
    for (std::size_t ei : g.in_edges(id)) {
        const Edge& e = g.edges()[ei];
        if (s.edges.count({e.from, e.to})) in.push_back(&e);
    }
    return in;
}

const NodeId& single_exit(const Subgraph& s) {
    if (s.exit.size() != 1)
        throw RuntimeError("MultipleExits",
                           "expected a single exit node, got " + std::to_string(s.exit.size()));
    return *s.exit.begin();
}

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double draw(const SampledInput& in) {
        if (!in.values.empty()) {
            std::uniform_int_distribution<std::size_t> d(0, in.values.size() - 1);
            return in.values[d(rng_)];
        }
        std::uniform_real_distribution<double> d(in.lo, in.hi);
        return d(rng_);
    }

private:
    std::mt19937_64 rng_;
};

// Fixed inputs plus one draw per varied input.
ActivationMap draw_point(const EvidenceCheck& c, Sampler& sampler) {
    ActivationMap point = c.fixed;
    for (const SampledInput& in : c.inputs) point[in.node] = sampler.draw(in);
    return point;
}

bool is_affine_constant(const AffineForm& f) { return f.coefficients.empty(); }

}  // namespace

double AffineForm::operator()(const ActivationMap& point) const {
    double y = offset;
    for (const auto& [id, c] : coefficients) y += c * point.at(id);
    return y;
}

const char* check_kind_name(CheckKind k) {
    switch (k) {
        case CheckKind::coefficient_equals: return "coefficient_equals";
        case CheckKind::hazard_ratio_equals: return "hazard_ratio_equals";
        case CheckKind::closed_form_affine: return "closed_form_affine";
        case CheckKind::extremum_at: return "extremum_at";
        case CheckKind::monotonic_on: return "monotonic_on";
        case CheckKind::additivity: return "additivity";
        case CheckKind::ablation_delta: return "ablation_delta";
        case CheckKind::perturbation_slope: return "perturbation_slope";
        case CheckKind::io_surrogate_fit: return "io_surrogate_fit";
        case CheckKind::substitution_equiv: return "substitution_equiv";
        case CheckKind::mutual_exclusivity: return "mutual_exclusivity";
    }
    return "?";
}

std::optional<CheckKind> check_kind_from_name(const std::string& name) {
    static const std::map<std::string, CheckKind> table = {
        {"coefficient_equals", CheckKind::coefficient_equals},
        {"hazard_ratio_equals", CheckKind::hazard_ratio_equals},
        {"closed_form_affine", CheckKind::closed_form_affine},
        {"extremum_at", CheckKind::extremum_at},
        {"monotonic_on", CheckKind::monotonic_on},
        {"additivity", CheckKind::additivity},
        {"ablation_delta", CheckKind::ablation_delta},
        {"perturbation_slope", CheckKind::perturbation_slope},
        {"io_surrogate_fit", CheckKind::io_surrogate_fit},
        {"substitution_equiv", CheckKind::substitution_equiv},
        {"mutual_exclusivity", CheckKind::mutual_exclusivity},
    };
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

CheckMode mode_for_kind(CheckKind k) {
    switch (k) {
        case CheckKind::coefficient_equals:
        case CheckKind::hazard_ratio_equals:
        case CheckKind::closed_form_affine:
        case CheckKind::extremum_at:
            return CheckMode::analytical;
        default:
            return CheckMode::empirical;
    }
}

const char* check_status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::error: return "error";
    }
    return "?";
}

double default_tolerance(CheckKind k) {
    switch (k) {
        case CheckKind::coefficient_equals: return 1e-6;
        case CheckKind::hazard_ratio_equals: return 0.005;
        case CheckKind::closed_form_affine: return 1e-6;
        default: return 1e-9;
    }
}

AffineForm derive_affine_closed_form(const ComputationalGraph& graph, const Subgraph& s) {
    for (const NodeId& id : s.nodes)
        if (!graph.has_node(id))
            throw RuntimeError("UnknownNode", "subgraph references unknown node '" + id + "'");
    const NodeId& exit = single_exit(s);

    std::map<NodeId, AffineForm> forms;
    for (const NodeId& id : restricted_topo_order(graph, s)) {
        const Node& n = graph.node(id);
        auto in = in_edges_within(graph, s, id);

        if (n.kind != NodeKind::input && n.op.kind == OpKind::constant) {
            forms[id] = AffineForm{{}, n.op.value};
            continue;
        }
        if (s.entry.count(id) || in.empty()) {
            // Boundary node: a free variable of the subgraph function.
            forms[id] = AffineForm{{{id, 1.0}}, 0.0};
            continue;
        }

        auto weighted = [&] {
            AffineForm z;
            for (const Edge* e : in) {
                const AffineForm& f = forms.at(e->from);
                for (const auto& [v, c] : f.coefficients) z.coefficients[v] += e->weight * c;
                z.offset += e->weight * f.offset;
            }
            return z;
        };

        switch (n.op.kind) {
            case OpKind::identity:
            case OpKind::weighted_sum:
                forms[id] = weighted();
                break;
            case OpKind::affine: {
                AffineForm z = weighted();
                for (auto& [v, c] : z.coefficients) c *= n.op.scale;
                z.offset = n.op.scale * z.offset + n.op.offset;
                forms[id] = z;
                break;
            }
            case OpKind::center: {
                AffineForm z = weighted();
                z.offset -= n.op.mean;
                forms[id] = z;
                break;
            }
            case OpKind::product: {
                double scale = 1.0;
                const AffineForm* variable = nullptr;
                for (const Edge* e : in) {
                    const AffineForm& f = forms.at(e->from);
                    if (is_affine_constant(f)) {
                        scale *= f.offset;
                    } else if (variable) {
                        throw RuntimeError("NotAffine",
                                           "product of two non-constant arguments at node '" +
                                               id + "'");
                    } else {
                        variable = &f;
                    }
                }
                AffineForm z;
                if (variable) {
                    z = *variable;
                    for (auto& [v, c] : z.coefficients) c *= scale;
                    z.offset *= scale;
                } else {
                    z.offset = scale;
                }
                forms[id] = z;
                break;
            }
            default:
                throw RuntimeError("NotAffine", std::string("non-affine operator '") +
                                                    op_kind_name(n.op.kind) + "' at node '" + id +
                                                    "'");
        }
    }
    auto it = forms.find(exit);
    if (it == forms.end())
        throw RuntimeError("UnknownNode", "exit '" + exit + "' not in subgraph");
    AffineForm result = it->second;
    // Drop exactly-zero coefficients so forms compare cleanly.
    std::erase_if(result.coefficients, [](const auto& kv) { return kv.second == 0.0; });
    return result;
}

ActivationMap evaluate_subgraph(const ComputationalGraph& graph, const Subgraph& s,
                                const ActivationMap& entry_values) {
    ActivationMap acts;
    for (const NodeId& id : restricted_topo_order(graph, s)) {
        const Node& n = graph.node(id);
        auto in = in_edges_within(graph, s, id);
        double a;
        if (auto it = entry_values.find(id); it != entry_values.end()) {
            a = it->second;
        } else if (n.kind != NodeKind::input && n.op.kind == OpKind::constant) {
            a = n.op.value;
        } else if (in.empty()) {
            throw RuntimeError("MissingEntryValue",
                               "no value for boundary node '" + id + "'");
        } else {
            auto weighted = [&] {
                double z = 0.0;
                for (const Edge* e : in) z += acts.at(e->from) * e->weight;
                return z;
            };
            switch (n.op.kind) {
                case OpKind::identity:
                case OpKind::weighted_sum: a = weighted(); break;
                case OpKind::product: {
                    a = 1.0;
                    for (const Edge* e : in) a *= acts.at(e->from);
                    break;
                }
                case OpKind::affine: a = n.op.scale * weighted() + n.op.offset; break;
                case OpKind::center: a = weighted() - n.op.mean; break;
                case OpKind::indicator:
                    a = std::abs(weighted() - n.op.category) < kIndicatorTol ? 1.0 : 0.0;
                    break;
                case OpKind::threshold: {
                    if (n.op.position < 0 || static_cast<std::size_t>(n.op.position) >= in.size())
                        throw RuntimeError("ThresholdPosition",
                                           "threshold position out of range at '" + id + "'");
                    double x = acts.at(in[n.op.position]->from);
                    a = (n.op.less_equal ? x <= n.op.cutoff : x > n.op.cutoff) ? 1.0 : 0.0;
                    break;
                }
                case OpKind::relu: a = std::max(0.0, weighted()); break;
                case OpKind::sigmoid: a = 1.0 / (1.0 + std::exp(-weighted())); break;
                case OpKind::exponential: a = std::exp(weighted()); break;
                case OpKind::power_base: a = std::pow(n.op.base, weighted()); break;
                case OpKind::one_minus: a = 1.0 - weighted(); break;
                default:
                    throw RuntimeError("BadOperator", "unhandled operator at node '" + id + "'");
            }
        }
        if (!std::isfinite(a))
            throw RuntimeError("NonFiniteActivation", "non-finite activation at node '" + id + "'");
        acts[id] = a;
    }
    return acts;
}

namespace {

double expected_value(const EvidenceCheck& c) {
    auto it = c.expected.find("value");
    if (it == c.expected.end())
        throw RuntimeError("MissingParameter", "check '" + c.id + "' needs params.expected");
    return it->second;
}

double tol_of(const EvidenceCheck& c) {
    return c.tolerance > 0.0 ? c.tolerance : default_tolerance(c.kind);
}

const Subgraph& subgraph_target(const EvidenceCheck& c) {
    if (!c.target.subgraph)
        throw RuntimeError("BadTarget", "check '" + c.id + "' needs a subgraph target");
    return *c.target.subgraph;
}

// Single-entry, single-exit subgraph as a scalar function.
class SubgraphFunction {
public:
    SubgraphFunction(const ComputationalGraph& g, const Subgraph& s) : g_(g), s_(s) {
        if (s.entry.size() != 1)
            throw RuntimeError("BadTarget", "expected a single entry node");
        entry_ = *s.entry.begin();
        exit_ = single_exit(s);
    }

    double operator()(double x) const {
        return evaluate_subgraph(g_, s_, {{entry_, x}}).at(exit_);
    }

private:
    const ComputationalGraph& g_;
    const Subgraph& s_;
    NodeId entry_;
    NodeId exit_;
};

VerificationResult check_coefficient_equals(const ComputationalGraph& g, const EvidenceCheck& c) {
    VerificationResult r{c.id};
    double tol = tol_of(c);
    if (c.target.edge) {
        double w = g.edge_weight(c.target.edge->first, c.target.edge->second);
        double want = expected_value(c);
        r.measured["coefficient"] = w;
        r.expected["coefficient"] = want;
        r.status = std::abs(w - want) <= tol ? CheckStatus::pass : CheckStatus::fail;
        return r;
    }
    AffineForm form = derive_affine_closed_form(g, subgraph_target(c));
    r.status = CheckStatus::pass;
    for (const auto& [name, want] : c.expected) {
        auto it = form.coefficients.find(name);
        double got = it == form.coefficients.end() ? 0.0 : it->second;
        r.measured[name] = got;
        r.expected[name] = want;
        if (std::abs(got - want) > tol) r.status = CheckStatus::fail;
    }
    return r;
}

VerificationResult check_hazard_ratio_equals(const ComputationalGraph& g, const EvidenceCheck& c) {
    VerificationResult r{c.id};
    double beta;
    if (c.target.edge) {
        beta = g.edge_weight(c.target.edge->first, c.target.edge->second);
    } else {
        AffineForm form = derive_affine_closed_form(g, subgraph_target(c));
        if (form.coefficients.size() != 1)
            throw RuntimeError("BadTarget",
                               "check '" + c.id + "': subgraph is not a single-coefficient form");
        beta = form.coefficients.begin()->second;
    }
    double want = expected_value(c);
    double hr = std::exp(beta);
    r.measured["beta"] = beta;
    r.measured["hazard_ratio"] = hr;
    r.expected["hazard_ratio"] = want;
    r.status = std::abs(hr - want) <= tol_of(c) ? CheckStatus::pass : CheckStatus::fail;
    return r;
}

VerificationResult check_closed_form_affine(const ComputationalGraph& g, const EvidenceCheck& c) {
    VerificationResult r{c.id};
    AffineForm form = derive_affine_closed_form(g, subgraph_target(c));
    double tol = tol_of(c);
    r.status = CheckStatus::pass;
    std::set<std::string> names;
    for (const auto& [name, _] : c.expected) names.insert(name);
    for (const auto& [name, _] : form.coefficients) names.insert(name);
    for (const std::string& name : names) {
        auto wi = c.expected.find(name);
        auto gi = form.coefficients.find(name);
        double want = wi == c.expected.end() ? 0.0 : wi->second;
        double got = gi == form.coefficients.end() ? 0.0 : gi->second;
        r.measured[name] = got;
        r.expected[name] = want;
        if (std::abs(got - want) > tol) r.status = CheckStatus::fail;
    }
    if (c.expected_offset) {
        r.measured["offset"] = form.offset;
        r.expected["offset"] = *c.expected_offset;
        if (std::abs(form.offset - *c.expected_offset) > tol) r.status = CheckStatus::fail;
    }
    return r;
}

VerificationResult check_extremum_at(const ComputationalGraph& g, const EvidenceCheck& c) {
    VerificationResult r{c.id};
    SubgraphFunction f(g, subgraph_target(c));
    double h = c.step;
    double x = c.x_star;
    double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    double d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    r.measured["derivative"] = d1;
    r.measured["second_difference"] = d2;
    r.expected["derivative"] = 0.0;
    bool flat = std::abs(d1) <= c.derivative_tol;
    bool curved = c.extremum == "max" ? d2 < 0.0 : d2 > 0.0;
    r.status = flat && curved ? CheckStatus::pass : CheckStatus::fail;
    if (!flat) r.diagnostics = "derivative at x* exceeds tolerance";
    else if (!curved) r.diagnostics = "second difference has the wrong sign for a " + c.extremum;
    return r;
}

VerificationResult check_monotonic_on(const ComputationalGraph& g, const EvidenceCheck& c) {
    VerificationResult r{c.id};
    SubgraphFunction f(g, subgraph_target(c));
    if (c.inputs.empty() || c.samples < 2)
        throw RuntimeError("MissingParameter",
                           "check '" + c.id + "' needs a grid (inputs range + samples >= 2)");
    const SampledInput& grid = c.inputs.front();
    double min_diff = 0.0, max_diff = 0.0;
    bool first = true;
    double prev = f(grid.lo);
    for (int i = 1; i < c.samples; ++i) {
        double x = grid.lo + (grid.hi - grid.lo) * i / (c.samples - 1);
        double y = f(x);
        double d = y - prev;
        if (first) { min_diff = max_diff = d; first = false; }
        min_diff = std::min(min_diff, d);
        max_diff = std::max(max_diff, d);
        prev = y;
    }
    r.measured["min_step"] = min_diff;
    r.measured["max_step"] = max_diff;
    bool increasing = c.direction != "decreasing";
    bool ok = increasing ? min_diff >= -c.slack : max_diff <= c.slack;
    r.status = ok ? CheckStatus::pass : CheckStatus::fail;
    return r;
}

NodeId observed_node(const EvidenceCheck& c) {
    if (!c.output.empty()) return c.output;
    if (c.target.node) return *c.target.node;
    throw RuntimeError("BadTarget", "check '" + c.id + "' needs an observed node");
}

VerificationResult check_additivity(const ComputationalGraph& g, const EvidenceCheck& c) {
    VerificationResult r{c.id};
    NodeId out = observed_node(c);
    double tol = tol_of(c);
    Sampler sampler(c.seed);
    double base = evaluate(g, c.fixed).at(out);
    double max_residual = 0.0;
    for (int s = 0; s < c.samples; ++s) {
        ActivationMap point = draw_point(c, sampler);
        double fx = evaluate(g, point).at(out);
        double sum = 0.0;
        for (const SampledInput& in : c.inputs) {
            ActivationMap one = c.fixed;
            one[in.node] = point.at(in.node);
            sum += evaluate(g, one).at(out) - base;
        }
        max_residual = std::max(max_residual, std::abs(fx - base - sum));
    }
    r.measured["max_residual"] = max_residual;
    r.expected["max_residual"] = 0.0;
    r.status = max_residual <= tol ? CheckStatus::pass : CheckStatus::fail;
    return r;
}

VerificationResult check_ablation_delta(const ComputationalGraph& g, const EvidenceCheck& c) {
    VerificationResult r{c.id};
    const Subgraph& s = subgraph_target(c);
    NodeId out = observed_node(c);
    double want = expected_value(c);
    double tol = tol_of(c);
    Sampler sampler(c.seed);
    EvalOverride zero_exits = [&s](const NodeId& id, const ActivationMap&) -> std::optional<double> {
        if (s.exit.count(id)) return 0.0;
        return std::nullopt;
    };
    r.status = CheckStatus::pass;
    double worst = 0.0;
    for (int i = 0; i < c.samples; ++i) {
        ActivationMap point = draw_point(c, sampler);
        double normal = evaluate(g, point).at(out);
        double ablated = evaluate(g, point, zero_exits).at(out);
        double delta = normal - ablated;
        if (i == 0 || std::abs(delta - want) > std::abs(worst - want)) worst = delta;
        if (std::abs(delta - want) > tol) r.status = CheckStatus::fail;
    }
    r.measured["delta"] = worst;
    r.expected["delta"] = want;
    return r;
}

VerificationResult check_perturbation_slope(const ComputationalGraph& g, const EvidenceCheck& c) {
    VerificationResult r{c.id};
    NodeId out = observed_node(c);
    if (c.vary.empty())
        throw RuntimeError("MissingParameter", "check '" + c.id + "' needs params.vary");
    double want = expected_value(c);
    double tol = tol_of(c);
    double h = c.step;
    Sampler sampler(c.seed);
    const SampledInput* range = nullptr;
    for (const SampledInput& in : c.inputs)
        if (in.node == c.vary) range = &in;
    r.status = CheckStatus::pass;
    double worst = 0.0;
    for (int i = 0; i < c.samples; ++i) {
        ActivationMap point = draw_point(c, sampler);
        double x = range ? point.at(c.vary) : c.fixed.at(c.vary);
        ActivationMap hi = point, lo = point;
        hi[c.vary] = x + h;
        lo[c.vary] = x - h;
        double slope = (evaluate(g, hi).at(out) - evaluate(g, lo).at(out)) / (2.0 * h);
        if (i == 0 || std::abs(slope - want) > std::abs(worst - want)) worst = slope;
        if (std::abs(slope - want) > tol) r.status = CheckStatus::fail;
    }
    r.measured["slope"] = worst;
    r.expected["slope"] = want;
    return r;
}

// Least-squares affine fit via normal equations; dimensions here are tiny.
AffineForm fit_affine(const std::vector<ActivationMap>& xs, const std::vector<double>& ys,
                      const std::vector<NodeId>& vars) {
    std::size_t k = vars.size() + 1;  // + intercept
    std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
    auto feature = [&](const ActivationMap& x, std::size_t j) {
        return j < vars.size() ? x.at(vars[j]) : 1.0;
    };
    for (std::size_t n = 0; n < xs.size(); ++n) {
        for (std::size_t i = 0; i < k; ++i) {
            double fi = feature(xs[n], i);
            for (std::size_t j = 0; j < k; ++j) a[i][j] += fi * feature(xs[n], j);
            a[i][k] += fi * ys[n];
        }
    }
    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < k; ++row)
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        std::swap(a[col], a[pivot]);
        if (std::abs(a[col][col]) < 1e-14)
            throw RuntimeError("SingularFit", "surrogate fit is underdetermined");
        for (std::size_t row = 0; row < k; ++row) {
            if (row == col) continue;
            double factor = a[row][col] / a[col][col];
            for (std::size_t j = col; j <= k; ++j) a[row][j] -= factor * a[col][j];
        }
    }
    AffineForm f;
    for (std::size_t j = 0; j < vars.size(); ++j) f.coefficients[vars[j]] = a[j][k] / a[j][j];
    f.offset = a[vars.size()][k] / a[vars.size()][vars.size()];
    return f;
}

VerificationResult check_io_surrogate_fit(const ComputationalGraph& g, const EvidenceCheck& c) {
    VerificationResult r{c.id};
    const Subgraph& s = subgraph_target(c);
    const NodeId& exit = single_exit(s);
    std::vector<NodeId> vars(s.entry.begin(), s.entry.end());
    std::map<NodeId, const SampledInput*> ranges;
    for (const SampledInput& in : c.inputs) ranges[in.node] = &in;
    for (const NodeId& v : vars)
        if (!ranges.count(v))
            throw RuntimeError("MissingParameter",
                               "check '" + c.id + "': no sampling range for entry '" + v + "'");
    Sampler sampler(c.seed);
    std::vector<ActivationMap> xs;
    std::vector<double> ys;
    for (int i = 0; i < c.samples; ++i) {
        ActivationMap point;
        for (const NodeId& v : vars) point[v] = sampler.draw(*ranges.at(v));
        ys.push_back(evaluate_subgraph(g, s, point).at(exit));
        xs.push_back(std::move(point));
    }
    AffineForm fit = fit_affine(xs, ys, vars);
    double max_residual = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        max_residual = std::max(max_residual, std::abs(fit(xs[i]) - ys[i]));
    for (const auto& [v, coef] : fit.coefficients) r.measured["coef:" + v] = coef;
    r.measured["offset"] = fit.offset;
    r.measured["max_residual"] = max_residual;
    r.expected["max_residual"] = 0.0;
    double tol = tol_of(c);
    r.status = max_residual <= tol ? CheckStatus::pass : CheckStatus::fail;
    if (r.status == CheckStatus::pass && !c.expected.empty()) {
        for (const auto& [name, want] : c.expected) {
            if (name == "offset") continue;
            auto it = fit.coefficients.find(name);
            double got = it == fit.coefficients.end() ? 0.0 : it->second;
            r.expected[name] = want;
            if (std::abs(got - want) > tol) r.status = CheckStatus::fail;
        }
    }
    return r;
}

VerificationResult check_substitution_equiv(const ComputationalGraph& g, const EvidenceCheck& c) {
    VerificationResult r{c.id};
    const Subgraph& s = subgraph_target(c);
    const NodeId& exit = single_exit(s);
    NodeId out = c.output.empty() ? g.output_ids().front() : c.output;
    double tol = tol_of(c);
    Sampler sampler(c.seed);

    auto surrogate = [&](const ActivationMap& acts) -> double {
        if (c.surrogate_family == "cox_risk") {
            if (s.entry.size() != 1)
                throw RuntimeError("BadTarget", "cox_risk surrogate expects a single entry");
            double eta = acts.at(*s.entry.begin());
            return 1.0 - std::pow(c.baseline_survival, std::exp(eta));
        }
        ActivationMap point;
        for (const auto& [v, _] : c.surrogate.coefficients) point[v] = acts.at(v);
        return c.surrogate(point);
    };
    EvalOverride substitute = [&](const NodeId& id, const ActivationMap& acts)
        -> std::optional<double> {
        if (id == exit) return surrogate(acts);
        return std::nullopt;
    };

    double max_dev = 0.0;
    for (int i = 0; i < c.samples; ++i) {
        ActivationMap point = draw_point(c, sampler);
        double normal = evaluate(g, point).at(out);
        double substituted = evaluate(g, point, substitute).at(out);
        max_dev = std::max(max_dev, std::abs(normal - substituted));
    }
    r.measured["max_deviation"] = max_dev;
    r.expected["max_deviation"] = 0.0;
    r.status = max_dev <= tol ? CheckStatus::pass : CheckStatus::fail;
    return r;
}

VerificationResult check_mutual_exclusivity(const ComputationalGraph& g, const EvidenceCheck& c) {
    VerificationResult r{c.id};
    if (c.target.node_list.empty())
        throw RuntimeError("BadTarget", "check '" + c.id + "' needs a node-list target");
    Sampler sampler(c.seed);
    r.status = CheckStatus::pass;
    int bad_samples = 0;
    for (int i = 0; i < c.samples; ++i) {
        ActivationMap acts = evaluate(g, draw_point(c, sampler));
        int ones = 0;
        bool clean = true;
        for (const NodeId& id : c.target.node_list) {
            double a = acts.at(id);
            if (std::abs(a - 1.0) < kIndicatorTol) ++ones;
            else if (std::abs(a) >= kIndicatorTol) clean = false;
        }
        if (ones != 1 || !clean) ++bad_samples;
    }
    r.measured["violating_samples"] = bad_samples;
    r.expected["violating_samples"] = 0.0;
    if (bad_samples > 0) {
        r.status = CheckStatus::fail;
        r.diagnostics = "some samples activated zero or multiple indicators";
    }
    return r;
}

}  // namespace

VerificationResult run_check(const ComputationalGraph& graph, const EvidenceCheck& check) {
    try {
        switch (check.kind) {
            case CheckKind::coefficient_equals: return check_coefficient_equals(graph, check);
            case CheckKind::hazard_ratio_equals: return check_hazard_ratio_equals(graph, check);
            case CheckKind::closed_form_affine: return check_closed_form_affine(graph, check);
            case CheckKind::extremum_at: return check_extremum_at(graph, check);
            case CheckKind::monotonic_on: return check_monotonic_on(graph, check);
            case CheckKind::additivity: return check_additivity(graph, check);
            case CheckKind::ablation_delta: return check_ablation_delta(graph, check);
            case CheckKind::perturbation_slope: return check_perturbation_slope(graph, check);
            case CheckKind::io_surrogate_fit: return check_io_surrogate_fit(graph, check);
            case CheckKind::substitution_equiv: return check_substitution_equiv(graph, check);
            case CheckKind::mutual_exclusivity: return check_mutual_exclusivity(graph, check);
        }
        throw RuntimeError("BadCheck", "unhandled check kind");
    } catch (const Error& e) {
        VerificationResult r{check.id};
        r.status = CheckStatus::error;
        r.diagnostics = e.what();
        return r;
    }
}

std::map<std::string, VerificationResult> verify_bundle(const ComputationalGraph& graph,
                                                        const AnnotationBundle& bundle) {
    std::map<std::string, VerificationResult> results;
    auto run_all = [&](const std::vector<EvidenceCheck>& checks) {
        for (const EvidenceCheck& c : checks) results[c.id] = run_check(graph, c);
    };
    for (const LeafAnnotation& a : bundle.leaves) run_all(a.evidence);
    for (const CompositionAnnotation& a : bundle.compositions) run_all(a.evidence);
    return results;
}

}  // namespace annotex
