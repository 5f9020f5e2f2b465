#include "annotex/annotations.hpp"

#include <algorithm>

namespace annotex {

namespace {

RuntimeError bundle_error(const std::string& code, const std::string& msg) {
    return {code, msg};
}

// Union coverage over a set of subgraphs: a node is covered when it appears
// in some node set and every host out-edge of it appears in the edge union.
CoverageRatio union_coverage(const ComputationalGraph& graph,
                             const std::vector<const Subgraph*>& parts) {
    std::set<NodeId> node_union;
    std::set<EdgeRef> edge_union;
    for (const Subgraph* s : parts) {
        node_union.insert(s->nodes.begin(), s->nodes.end());
        edge_union.insert(s->edges.begin(), s->edges.end());
    }
    CoverageRatio out;
    std::size_t covered = 0;
    for (const Node& n : graph.nodes()) {
        bool ok = node_union.count(n.id) > 0;
        if (ok) {
            for (std::size_t ei : graph.out_edges(n.id)) {
                const Edge& e = graph.edges()[ei];
                if (!edge_union.count({e.from, e.to})) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) ++covered;
        else out.uncovered.insert(n.id);
    }
    out.ratio = graph.nodes().empty() ? 1.0
                                      : static_cast<double>(covered) / graph.nodes().size();
    return out;
}

std::set<NodeId> descendant_region(const AnnotationBundle& bundle, const std::string& id) {
    std::set<NodeId> region;
    if (const LeafAnnotation* leaf = bundle.find_leaf(id)) {
        region.insert(leaf->subgraph.nodes.begin(), leaf->subgraph.nodes.end());
        return region;
    }
    if (const CompositionAnnotation* comp = bundle.find_composition(id)) {
        region.insert(comp->junction.nodes.begin(), comp->junction.nodes.end());
        for (const std::string& child : comp->children) {
            std::set<NodeId> sub = descendant_region(bundle, child);
            region.insert(sub.begin(), sub.end());
        }
    }
    return region;
}

}  // namespace

const LeafAnnotation* AnnotationBundle::find_leaf(const std::string& id) const {
    for (const LeafAnnotation& a : leaves)
        if (a.id == id) return &a;
    return nullptr;
}

const CompositionAnnotation* AnnotationBundle::find_composition(const std::string& id) const {
    for (const CompositionAnnotation& a : compositions)
        if (a.id == id) return &a;
    return nullptr;
}

void validate_bundle(const ComputationalGraph& graph, const AnnotationBundle& bundle) {
    // An entirely empty bundle is structurally fine; it simply fails every
    // well-formedness requirement later.
    if (bundle.leaves.empty() && bundle.compositions.empty() && bundle.root.empty()) return;

    std::set<std::string> ids;
    for (const LeafAnnotation& a : bundle.leaves)
        if (!ids.insert(a.id).second)
            throw bundle_error("DuplicateAnnotation", "annotation id '" + a.id + "' reused");
    for (const CompositionAnnotation& a : bundle.compositions)
        if (!ids.insert(a.id).second)
            throw bundle_error("DuplicateAnnotation", "annotation id '" + a.id + "' reused");

    std::map<std::string, std::string> parent_of;
    for (const CompositionAnnotation& a : bundle.compositions) {
        if (a.children.empty())
            throw bundle_error("NotATree", "composition '" + a.id + "' has no children");
        for (const std::string& child : a.children) {
            if (!ids.count(child))
                throw bundle_error("DanglingChild",
                                   "composition '" + a.id + "' references unknown '" + child + "'");
            if (!parent_of.emplace(child, a.id).second)
                throw bundle_error("DuplicateParent", "annotation '" + child +
                                                          "' is claimed by two parents");
        }
    }
    if (!ids.count(bundle.root))
        throw bundle_error("UnknownRoot", "root '" + bundle.root + "' does not resolve");
    if (parent_of.count(bundle.root))
        throw bundle_error("NotATree", "root '" + bundle.root + "' has a parent");

    // Every annotation except the root must hang off the tree, and walking up
    // from any node must reach the root (no cycles among compositions).
    for (const std::string& id : ids) {
        std::string cur = id;
        std::set<std::string> seen;
        while (cur != bundle.root) {
            if (!seen.insert(cur).second)
                throw bundle_error("NotATree", "cycle through annotation '" + cur + "'");
            auto it = parent_of.find(cur);
            if (it == parent_of.end())
                throw bundle_error("NotATree", "annotation '" + cur + "' is not reachable from root");
            cur = it->second;
        }
    }

    for (const LeafAnnotation& a : bundle.leaves) {
        if (a.hypothesis.empty())
            throw bundle_error("EmptyHypothesis", "leaf '" + a.id + "' has no hypothesis");
        if (a.evidence.empty())
            throw bundle_error("EmptyEvidence", "leaf '" + a.id + "' has no evidence");
        ValidityResult v = validate_subgraph(graph, a.subgraph);
        if (!v.valid)
            throw bundle_error("InvalidSubgraph", "leaf '" + a.id + "' has an invalid subgraph");
    }
    for (const CompositionAnnotation& a : bundle.compositions) {
        if (a.hypothesis.empty())
            throw bundle_error("EmptyHypothesis", "composition '" + a.id + "' has no hypothesis");
        if (a.evidence.empty())
            throw bundle_error("EmptyEvidence", "composition '" + a.id + "' has no evidence");
        // A single-child composition is a no-op anywhere but the root, where
        // it may wrap one leaf spanning the whole model.
        if (a.children.size() < 2 && a.id != bundle.root)
            throw bundle_error("NotATree",
                               "composition '" + a.id + "' has fewer than two children");
    }
}

std::set<NodeId> covered_nodes(const ComputationalGraph& graph, const LeafAnnotation& a) {
    ValidityResult v = validate_subgraph(graph, a.subgraph);
    if (!v.valid)
        throw bundle_error("InvalidSubgraph", "annotation '" + a.id + "' has an invalid subgraph");
    std::set<NodeId> covered;
    for (const NodeId& id : a.subgraph.nodes) {
        bool ok = true;
        for (std::size_t ei : graph.out_edges(id)) {
            const Edge& e = graph.edges()[ei];
            if (!a.subgraph.edges.count({e.from, e.to})) {
                ok = false;
                break;
            }
        }
        if (ok) covered.insert(id);
    }
    return covered;
}

CoverageRatio structural_coverage(const ComputationalGraph& graph,
                                  const std::vector<LeafAnnotation>& leaves) {
    std::vector<const Subgraph*> parts;
    for (const LeafAnnotation& a : leaves) {
        ValidityResult v = validate_subgraph(graph, a.subgraph);
        if (!v.valid)
            throw bundle_error("InvalidSubgraph",
                               "annotation '" + a.id + "' has an invalid subgraph");
        parts.push_back(&a.subgraph);
    }
    return union_coverage(graph, parts);
}

CoverageRatio bundle_structural_coverage(const ComputationalGraph& graph,
                                         const AnnotationBundle& bundle) {
    std::vector<const Subgraph*> parts;
    for (const LeafAnnotation& a : bundle.leaves) parts.push_back(&a.subgraph);
    for (const CompositionAnnotation& a : bundle.compositions) parts.push_back(&a.junction);
    return union_coverage(graph, parts);
}

CompositionalCoverage compositional_coverage(
    const ComputationalGraph& graph, const AnnotationBundle& bundle,
    const std::map<std::string, VerificationResult>& results) {
    CompositionalCoverage out;
    if (bundle.compositions.empty()) {
        // No composition annotation exists. That is fine only for a trivial
        // bundle: a single leaf that already spans and covers the whole model.
        if (bundle.leaves.size() == 1) {
            const LeafAnnotation& leaf = bundle.leaves.front();
            CoverageRatio sc = union_coverage(graph, {&leaf.subgraph});
            bool spans = sc.uncovered.empty();
            for (const NodeId& in : graph.input_ids())
                if (!leaf.subgraph.entry.count(in)) spans = false;
            for (const NodeId& o : graph.output_ids())
                if (!leaf.subgraph.exit.count(o)) spans = false;
            out.ratio = spans ? 1.0 : 0.0;
        } else {
            out.ratio = 0.0;
        }
        return out;
    }

    std::size_t verified = 0;
    for (const CompositionAnnotation& comp : bundle.compositions) {
        bool ok = true;
        std::string why;

        ValidityResult v = validate_subgraph(graph, comp.junction);
        if (!v.valid) {
            ok = false;
            why = "invalid junction subgraph";
        }

        // The junction must attach to the region its children explain: each
        // junction entry appears in some descendant's subgraph.
        if (ok) {
            std::set<NodeId> region;
            for (const std::string& child : comp.children) {
                std::set<NodeId> sub = descendant_region(bundle, child);
                region.insert(sub.begin(), sub.end());
            }
            for (const NodeId& id : comp.junction.entry) {
                if (!region.count(id)) {
                    ok = false;
                    why = "junction entry '" + id + "' outside the children's region";
                    break;
                }
            }
        }

        if (ok) {
            for (const EvidenceCheck& c : comp.evidence) {
                auto it = results.find(c.id);
                if (it == results.end() || it->second.status != CheckStatus::pass) {
                    ok = false;
                    why = "evidence check '" + c.id + "' did not pass";
                    break;
                }
            }
        }

        if (ok) ++verified;
        else out.unverified.insert(comp.id);
    }
    out.ratio = static_cast<double>(verified) / bundle.compositions.size();
    return out;
}

WellFormedness check_well_formed(const ComputationalGraph& graph, const AnnotationBundle& bundle,
                                 const std::map<std::string, VerificationResult>& results) {
    WellFormedness wf;

    // (1) Every leaf annotation is valid.
    wf.requirements[0] = true;
    for (const LeafAnnotation& a : bundle.leaves) {
        ValidityResult v = validate_subgraph(graph, a.subgraph);
        if (!v.valid) {
            wf.requirements[0] = false;
            std::string detail = "leaf '" + a.id + "' invalid";
            if (!v.violators.empty()) detail += "; violating node '" + v.violators.front() + "'";
            wf.failures.push_back({"leaf_validity", detail});
        }
        if (a.hypothesis.empty() || a.evidence.empty()) {
            wf.requirements[0] = false;
            wf.failures.push_back({"leaf_validity",
                                   "leaf '" + a.id + "' lacks a hypothesis or evidence"});
        }
    }
    if (bundle.leaves.empty() && !graph.nodes().empty()) {
        wf.requirements[0] = false;
        wf.failures.push_back({"leaf_validity", "bundle has no leaf annotations"});
    }

    // (2) Full structural coverage.
    CoverageRatio sc = bundle_structural_coverage(graph, bundle);
    wf.requirements[1] = sc.uncovered.empty();
    if (!wf.requirements[1]) {
        std::string detail = "structural coverage " + std::to_string(sc.ratio) + "; uncovered:";
        std::size_t listed = 0;
        for (const NodeId& id : sc.uncovered) {
            if (listed++ == 8) { detail += " ..."; break; }
            detail += " " + id;
        }
        wf.failures.push_back({"structural_coverage", detail});
    }

    // (3) Full compositional coverage.
    CompositionalCoverage cc = compositional_coverage(graph, bundle, results);
    wf.requirements[2] = cc.ratio == 1.0;
    if (!wf.requirements[2]) {
        std::string detail = "compositional coverage " + std::to_string(cc.ratio);
        if (!cc.unverified.empty()) {
            detail += "; unverified:";
            for (const std::string& id : cc.unverified) detail += " " + id;
        } else {
            detail += "; a composition annotation is required but missing";
        }
        wf.failures.push_back({"compositional_coverage", detail});
    }

    // (4) The root spans the model: leaf entries reach every model input and
    // the root's exit covers every model output.
    bool root_ok = true;
    std::set<NodeId> leaf_entries;
    for (const LeafAnnotation& a : bundle.leaves)
        leaf_entries.insert(a.subgraph.entry.begin(), a.subgraph.entry.end());
    for (const NodeId& in : graph.input_ids()) {
        if (!leaf_entries.count(in)) {
            root_ok = false;
            wf.failures.push_back({"root_span", "model input '" + in + "' is not a leaf entry"});
        }
    }
    const Subgraph* root_sub = nullptr;
    if (const CompositionAnnotation* c = bundle.find_composition(bundle.root)) root_sub = &c->junction;
    else if (const LeafAnnotation* l = bundle.find_leaf(bundle.root)) root_sub = &l->subgraph;
    if (!root_sub) {
        root_ok = false;
        wf.failures.push_back({"root_span", "root annotation does not resolve"});
    } else {
        for (const NodeId& out : graph.output_ids()) {
            if (!root_sub->exit.count(out)) {
                root_ok = false;
                wf.failures.push_back({"root_span",
                                       "model output '" + out + "' is not an exit of the root"});
            }
        }
    }
    wf.requirements[3] = root_ok;

    return wf;
}

Verdict explainability_criterion(const ComputationalGraph& graph, const AnnotationBundle& bundle,
                                 const std::map<std::string, VerificationResult>& results) {
    Verdict v;
    WellFormedness wf = check_well_formed(graph, bundle, results);
    v.well_formed = wf.all();
    v.failures = wf.failures;

    v.all_evidence_verified = true;
    auto inspect = [&](const std::string& owner, const std::vector<EvidenceCheck>& checks) {
        for (const EvidenceCheck& c : checks) {
            auto it = results.find(c.id);
            if (it == results.end()) {
                v.all_evidence_verified = false;
                v.failures.push_back({"evidence", "check '" + c.id + "' of '" + owner +
                                                      "' has no result"});
            } else if (it->second.status != CheckStatus::pass) {
                v.all_evidence_verified = false;
                v.failures.push_back(
                    {"evidence", "check '" + c.id + "' of '" + owner + "' status " +
                                     check_status_name(it->second.status)});
            }
        }
    };
    for (const LeafAnnotation& a : bundle.leaves) inspect(a.id, a.evidence);
    for (const CompositionAnnotation& a : bundle.compositions) inspect(a.id, a.evidence);

    v.explainable = v.well_formed && v.all_evidence_verified;
    return v;
}

CoverageReport explainedness(const ComputationalGraph& graph, const AnnotationBundle& bundle,
                             const std::map<std::string, VerificationResult>& results) {
    CoverageReport r;
    CoverageRatio sc = bundle_structural_coverage(graph, bundle);
    r.structural = sc.ratio;
    r.uncovered_nodes = sc.uncovered;
    CompositionalCoverage cc = compositional_coverage(graph, bundle, results);
    r.compositional = cc.ratio;
    r.unverified_compositions = cc.unverified;
    return r;
}

std::vector<std::string> collect_warnings(const AnnotationBundle& bundle, int arity_threshold) {
    std::vector<std::string> warnings;
    for (const CompositionAnnotation& a : bundle.compositions) {
        if (static_cast<int>(a.children.size()) > arity_threshold) {
            warnings.push_back("composition '" + a.id + "' has arity " +
                               std::to_string(a.children.size()) + " (threshold " +
                               std::to_string(arity_threshold) +
                               "); a flat composition this wide rarely explains anything");
        }
    }
    return warnings;
}

}  // namespace annotex
