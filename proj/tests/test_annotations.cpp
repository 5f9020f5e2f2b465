#include "annotex/annotations.hpp"
#include "annotex/predict.hpp"
#include "doctest.h"

using namespace annotex;

namespace {

ComputationalGraph branching_graph() {
    return ComputationalGraph::Builder{}
        .input("I")
        .compute("H1", OperatorSpec::identity())
        .compute("H2", OperatorSpec::identity())
        .output("O", OperatorSpec::weighted_sum())
        .edge("I", "H1")
        .edge("I", "H2")
        .edge("H1", "O")
        .edge("H2", "O")
        .build();
}

ComputationalGraph linear_graph() {
    return ComputationalGraph::Builder{}
        .input("x1")
        .input("x2")
        .output("y", OperatorSpec::affine(1.0, 1.0))
        .edge("x1", "y", 2.0)
        .edge("x2", "y", 3.0)
        .build();
}

EvidenceCheck weight_check(const std::string& id, const NodeId& from, const NodeId& to,
                           double expected) {
    EvidenceCheck c;
    c.id = id;
    c.kind = CheckKind::coefficient_equals;
    c.target.edge = EdgeRef{from, to};
    c.expected["value"] = expected;
    return c;
}

LeafAnnotation path_leaf(const std::string& id, const NodeId& mid) {
    LeafAnnotation a;
    a.id = id;
    a.subgraph = Subgraph{{"I"}, {"O"}, {"I", mid, "O"}, {{"I", mid}, {mid, "O"}}};
    a.hypothesis = "the " + mid + " path forwards the input unchanged";
    a.evidence = {weight_check(id + ".w", mid, "O", 1.0)};
    return a;
}

AnnotationBundle partial_bundle() {
    AnnotationBundle b;
    b.context = {"devs", "English", "unit test"};
    b.leaves = {path_leaf("A1", "H1")};
    b.root = "A1";
    return b;
}

AnnotationBundle full_bundle() {
    AnnotationBundle b = partial_bundle();
    b.leaves.push_back(path_leaf("A2", "H2"));

    CompositionAnnotation c;
    c.id = "C";
    c.junction = Subgraph{{"O"}, {"O"}, {"O"}, {}};
    c.hypothesis = "the two branch contributions add at the output";
    EvidenceCheck affine;
    affine.id = "C.affine";
    affine.kind = CheckKind::closed_form_affine;
    Subgraph all{{"I"}, {"O"}, {"I", "H1", "H2", "O"},
                 {{"I", "H1"}, {"I", "H2"}, {"H1", "O"}, {"H2", "O"}}};
    affine.target.subgraph = all;
    affine.expected = {{"I", 2.0}};
    affine.expected_offset = 0.0;
    c.evidence = {affine};
    c.children = {"A1", "A2"};
    b.compositions = {c};
    b.root = "C";
    return b;
}

}  // namespace

TEST_CASE("covered_nodes follows the all-out-edges rule") {
    ComputationalGraph g = branching_graph();
    AnnotationBundle b = partial_bundle();
    std::set<NodeId> cov = covered_nodes(g, b.leaves.front());
    CHECK(cov == std::set<NodeId>{"H1", "O"});  // I keeps an out-edge to H2, outside A1

    ComputationalGraph lin = linear_graph();
    LeafAnnotation a1;
    a1.id = "A1";
    a1.subgraph = Subgraph{{"x1"}, {"y"}, {"x1", "y"}, {{"x1", "y"}}};
    a1.hypothesis = "x1 contributes linearly";
    a1.evidence = {weight_check("A1.w", "x1", "y", 2.0)};
    CHECK(covered_nodes(lin, a1) == std::set<NodeId>{"x1", "y"});
}

TEST_CASE("structural coverage: 0.50 partial, 1.0 full, 0.0 empty") {
    ComputationalGraph g = branching_graph();

    AnnotationBundle partial = partial_bundle();
    CoverageRatio r = structural_coverage(g, partial.leaves);
    CHECK(r.ratio == 0.5);
    CHECK(r.uncovered == std::set<NodeId>{"H2", "I"});

    AnnotationBundle full = full_bundle();
    r = structural_coverage(g, full.leaves);
    CHECK(r.ratio == 1.0);
    CHECK(r.uncovered.empty());

    r = structural_coverage(g, {});
    CHECK(r.ratio == 0.0);
    CHECK(r.uncovered.size() == 4);
}

TEST_CASE("structural coverage is monotone and idempotent under union") {
    ComputationalGraph g = branching_graph();
    AnnotationBundle full = full_bundle();

    double prev = 0.0;
    std::vector<LeafAnnotation> acc;
    for (const LeafAnnotation& a : full.leaves) {
        acc.push_back(a);
        double cur = structural_coverage(g, acc).ratio;
        CHECK(cur >= prev);
        prev = cur;
    }
    // Adding a duplicate annotation changes nothing.
    acc.push_back(full.leaves.front());
    CHECK(structural_coverage(g, acc).ratio == prev);
}

TEST_CASE("compositional coverage needs verified compositions") {
    ComputationalGraph g = branching_graph();
    AnnotationBundle full = full_bundle();
    auto results = verify_bundle(g, full);
    CompositionalCoverage cc = compositional_coverage(g, full, results);
    CHECK(cc.ratio == 1.0);
    CHECK(cc.unverified.empty());

    // Force the composition's evidence to fail.
    AnnotationBundle broken = full;
    broken.compositions.front().evidence.front().expected = {{"I", 3.0}};
    results = verify_bundle(g, broken);
    cc = compositional_coverage(g, broken, results);
    CHECK(cc.ratio == 0.0);
    CHECK(cc.unverified == std::set<std::string>{"C"});

    // A leaf-only bundle that does not span the model scores 0.
    AnnotationBundle partial = partial_bundle();
    results = verify_bundle(g, partial);
    cc = compositional_coverage(g, partial, results);
    CHECK(cc.ratio == 0.0);
}

TEST_CASE("a spanning single leaf is vacuously composed") {
    ComputationalGraph lin = linear_graph();
    AnnotationBundle b;
    b.context = {"devs", "English", "unit test"};
    LeafAnnotation a;
    a.id = "A";
    a.subgraph = Subgraph{{"x1", "x2"}, {"y"}, {"x1", "x2", "y"}, {{"x1", "y"}, {"x2", "y"}}};
    a.hypothesis = "the whole model is one affine map";
    a.evidence = {weight_check("A.w1", "x1", "y", 2.0)};
    b.leaves = {a};
    b.root = "A";
    auto results = verify_bundle(lin, b);
    CHECK(compositional_coverage(lin, b, results).ratio == 1.0);
    CHECK(explainability_criterion(lin, b, results).explainable);
}

TEST_CASE("well-formedness reports which requirement failed") {
    ComputationalGraph g = branching_graph();

    AnnotationBundle partial = partial_bundle();
    auto results = verify_bundle(g, partial);
    WellFormedness wf = check_well_formed(g, partial, results);
    CHECK(wf.requirements[0]);       // the A1 subgraph itself is valid
    CHECK_FALSE(wf.requirements[1]);  // structural coverage 0.5
    CHECK_FALSE(wf.requirements[2]);  // no verified composition
    CHECK_FALSE(wf.all());
    CHECK_FALSE(wf.failures.empty());

    AnnotationBundle full = full_bundle();
    results = verify_bundle(g, full);
    wf = check_well_formed(g, full, results);
    CHECK(wf.all());
    CHECK(wf.failures.empty());
    CHECK(explainability_criterion(g, full, results).explainable);
}

TEST_CASE("failing evidence blocks the verdict but not well-formedness bookkeeping") {
    ComputationalGraph g = branching_graph();
    AnnotationBundle b = full_bundle();
    b.leaves.front().evidence.front().expected["value"] = 0.9;
    auto results = verify_bundle(g, b);
    Verdict v = explainability_criterion(g, b, results);
    CHECK_FALSE(v.explainable);
    CHECK_FALSE(v.all_evidence_verified);
}

TEST_CASE("bundle validation rejects malformed trees") {
    ComputationalGraph g = branching_graph();

    auto code_of = [&](const AnnotationBundle& b) {
        try {
            validate_bundle(g, b);
        } catch (const Error& e) {
            return e.code();
        }
        return std::string("no error");
    };

    AnnotationBundle b = full_bundle();
    CHECK(code_of(b) == "no error");

    AnnotationBundle dangling = full_bundle();
    dangling.compositions.front().children.push_back("A9");
    CHECK(code_of(dangling) == "DanglingChild");

    AnnotationBundle dup_parent = full_bundle();
    dup_parent.compositions.push_back(dup_parent.compositions.front());
    dup_parent.compositions.back().id = "C2";
    CHECK(code_of(dup_parent) == "DuplicateParent");

    AnnotationBundle bad_root = full_bundle();
    bad_root.root = "nope";
    CHECK(code_of(bad_root) == "UnknownRoot");

    AnnotationBundle no_evidence = full_bundle();
    no_evidence.leaves.front().evidence.clear();
    CHECK(code_of(no_evidence) == "EmptyEvidence");

    AnnotationBundle no_hypothesis = full_bundle();
    no_hypothesis.compositions.front().hypothesis.clear();
    CHECK(code_of(no_hypothesis) == "EmptyHypothesis");

    AnnotationBundle bad_subgraph = full_bundle();
    bad_subgraph.leaves.front().subgraph.nodes.insert("H2");  // H2 off the A1 path
    CHECK(code_of(bad_subgraph) == "InvalidSubgraph");

    AnnotationBundle childless = full_bundle();
    childless.compositions.front().children.clear();
    CHECK(code_of(childless) == "NotATree");
}

TEST_CASE("arity warning fires above the threshold only") {
    AnnotationBundle b = full_bundle();
    CHECK(collect_warnings(b, 10).empty());
    CHECK(collect_warnings(b, 1).size() == 1);

    // 12 children tips over the default threshold of 10.
    AnnotationBundle wide = full_bundle();
    for (int i = 3; i <= 12; ++i) {
        LeafAnnotation extra = wide.leaves.front();
        extra.id = "A" + std::to_string(i);
        wide.leaves.push_back(extra);
        wide.compositions.front().children.push_back(extra.id);
    }
    std::vector<std::string> w = collect_warnings(wide, 10);
    REQUIRE(w.size() == 1);
    CHECK(w.front().find("12") != std::string::npos);
}

TEST_CASE("explainedness bundles both coverage figures") {
    ComputationalGraph g = branching_graph();
    AnnotationBundle partial = partial_bundle();
    auto results = verify_bundle(g, partial);
    CoverageReport rep = explainedness(g, partial, results);
    CHECK(rep.structural == 0.5);
    CHECK(rep.compositional == 0.0);
    CHECK(rep.uncovered_nodes == std::set<NodeId>{"H2", "I"});
}
