#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "annotex/graph.hpp"

namespace annotex {

struct AnnotationBundle;

// Exact linear representation of a subgraph's entry->exit map.
struct AffineForm {
    std::map<NodeId, double> coefficients;
    double offset = 0.0;

    double operator()(const ActivationMap& point) const;
};

enum class CheckKind {
    coefficient_equals,
    hazard_ratio_equals,
    closed_form_affine,
    extremum_at,
    monotonic_on,
    additivity,
    ablation_delta,
    perturbation_slope,
    io_surrogate_fit,
    substitution_equiv,
    mutual_exclusivity,
};

enum class CheckMode { analytical, empirical };

const char* check_kind_name(CheckKind k);
std::optional<CheckKind> check_kind_from_name(const std::string& name);
CheckMode mode_for_kind(CheckKind k);

// What a check inspects: a single edge weight, a node's activation, a
// subgraph function, or (for mutual exclusivity) a set of indicator nodes.
struct CheckTarget {
    std::optional<EdgeRef> edge;
    std::optional<NodeId> node;
    std::optional<Subgraph> subgraph;
    std::vector<NodeId> node_list;
};

// One input dimension sampled by an empirical check: either a continuous
// range [lo, hi] or an explicit list of categorical values.
struct SampledInput {
    NodeId node;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> values;
};

struct EvidenceCheck {
    std::string id;
    CheckKind kind = CheckKind::coefficient_equals;
    CheckMode mode = CheckMode::analytical;
    CheckTarget target;

    std::map<std::string, double> expected;  // "value" for scalar kinds; node ids for affine
    std::optional<double> expected_offset;   // closed_form_affine
    double tolerance = 0.0;                  // 0 means "use the kind default"
    double step = 1e-4;                      // finite-difference step
    double derivative_tol = 1e-3;            // extremum_at: |f'(x*)| bound
    double slack = 0.0;                      // monotonic_on
    double x_star = 0.0;                     // extremum_at
    std::string extremum;                    // "min" or "max"
    std::string direction;                   // monotonic_on: "increasing" or "decreasing"
    int samples = 1;
    std::uint64_t seed = 0;
    std::vector<SampledInput> inputs;        // varied graph inputs
    ActivationMap fixed;                     // pinned graph inputs
    NodeId output;                           // observed node for graph-level checks
    NodeId vary;                             // perturbation_slope: the varied input
    AffineForm surrogate;                    // substitution_equiv (affine family)
    std::string surrogate_family;            // "affine" or "cox_risk"
    double baseline_survival = 0.0;          // substitution_equiv cox_risk family
    std::string note;                        // carried verbatim into reports
};

enum class CheckStatus { pass, fail, error };

const char* check_status_name(CheckStatus s);

struct VerificationResult {
    std::string check_id;
    CheckStatus status = CheckStatus::error;
    std::map<std::string, double> measured;
    std::map<std::string, double> expected;
    std::string diagnostics;
};

double default_tolerance(CheckKind k);

// Symbolic propagation of affine forms through the subgraph. Entries (and any
// member without an in-subgraph incoming edge) become variables. Throws
// NotAffine naming the blocking node, or MultipleExits.
AffineForm derive_affine_closed_form(const ComputationalGraph& graph, const Subgraph& s);

// Numeric entry->exit evaluation restricted to the subgraph's edges.
ActivationMap evaluate_subgraph(const ComputationalGraph& graph, const Subgraph& s,
                                const ActivationMap& entry_values);

VerificationResult run_check(const ComputationalGraph& graph, const EvidenceCheck& check);

// Executes every check of every annotation. Result order is by check id;
// failures of one check never affect another.
std::map<std::string, VerificationResult> verify_bundle(const ComputationalGraph& graph,
                                                        const AnnotationBundle& bundle);

}  // namespace annotex
