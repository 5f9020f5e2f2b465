#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "annotex/evidence.hpp"
#include "annotex/graph.hpp"

namespace annotex {

struct ExplanationContext {
    std::string audience;
    std::string language;
    std::string purpose;
};

struct LeafAnnotation {
    std::string id;
    Subgraph subgraph;
    std::string hypothesis;
    std::vector<EvidenceCheck> evidence;
};

struct CompositionAnnotation {
    std::string id;
    Subgraph junction;
    std::string hypothesis;
    std::vector<EvidenceCheck> evidence;
    std::vector<std::string> children;
};

// A rooted tree: leaves are LeafAnnotations, internal nodes are
// CompositionAnnotations. The shared context is recorded, never judged.
struct AnnotationBundle {
    ExplanationContext context;
    std::vector<LeafAnnotation> leaves;
    std::vector<CompositionAnnotation> compositions;
    std::string root;

    const LeafAnnotation* find_leaf(const std::string& id) const;
    const CompositionAnnotation* find_composition(const std::string& id) const;
};

// Throws on tree violations (DanglingChild, DuplicateParent, NotATree,
// UnknownRoot), empty hypotheses/evidence, and invalid leaf subgraphs.
void validate_bundle(const ComputationalGraph& graph, const AnnotationBundle& bundle);

// Per-annotation rule: v is covered iff v is a member and all of v's host
// out-edges are inside the annotation's edge set.
std::set<NodeId> covered_nodes(const ComputationalGraph& graph, const LeafAnnotation& a);

struct CoverageRatio {
    double ratio = 0.0;
    std::set<NodeId> uncovered;
};

// Union semantics: v is covered iff v appears in some annotation's node set
// and every host out-edge of v appears in the union of all edge sets.
CoverageRatio structural_coverage(const ComputationalGraph& graph,
                                  const std::vector<LeafAnnotation>& leaves);

// Same rule with composition junctions contributing to the union.
CoverageRatio bundle_structural_coverage(const ComputationalGraph& graph,
                                         const AnnotationBundle& bundle);

struct CompositionalCoverage {
    double ratio = 1.0;
    std::set<std::string> unverified;
};

CompositionalCoverage compositional_coverage(
    const ComputationalGraph& graph, const AnnotationBundle& bundle,
    const std::map<std::string, VerificationResult>& results);

struct WellFormedness {
    // The four requirements, in order: leaves valid, structural coverage,
    // compositional coverage, root spans the model.
    bool requirements[4] = {false, false, false, false};
    std::vector<std::pair<std::string, std::string>> failures;

    bool all() const {
        return requirements[0] && requirements[1] && requirements[2] && requirements[3];
    }
};

WellFormedness check_well_formed(const ComputationalGraph& graph, const AnnotationBundle& bundle,
                                 const std::map<std::string, VerificationResult>& results);

struct Verdict {
    bool well_formed = false;
    bool all_evidence_verified = false;
    bool explainable = false;
    std::vector<std::pair<std::string, std::string>> failures;
};

Verdict explainability_criterion(const ComputationalGraph& graph, const AnnotationBundle& bundle,
                                 const std::map<std::string, VerificationResult>& results);

struct CoverageReport {
    double structural = 0.0;
    double compositional = 0.0;
    std::set<NodeId> uncovered_nodes;
    std::set<std::string> unverified_compositions;
};

CoverageReport explainedness(const ComputationalGraph& graph, const AnnotationBundle& bundle,
                             const std::map<std::string, VerificationResult>& results);

// Non-fatal report warnings; currently the flat-composition arity warning.
std::vector<std::string> collect_warnings(const AnnotationBundle& bundle, int arity_threshold);

}  // namespace annotex
