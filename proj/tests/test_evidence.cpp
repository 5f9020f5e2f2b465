#include <cmath>

#include "annotex/annotations.hpp"
#include "annotex/evidence.hpp"
#include "annotex/predict.hpp"
#include "doctest.h"

using namespace annotex;

namespace {

ComputationalGraph linear_graph() {
    return ComputationalGraph::Builder{}
        .input("x1")
        .input("x2")
        .output("y", OperatorSpec::affine(1.0, 1.0))
        .edge("x1", "y", 2.0)
        .edge("x2", "y", 3.0)
        .build();
}

Subgraph whole(const ComputationalGraph& g) {
    Subgraph s;
    for (const NodeId& in : g.input_ids()) s.entry.insert(in);
    for (const NodeId& out : g.output_ids()) s.exit.insert(out);
    for (const Node& n : g.nodes()) s.nodes.insert(n.id);
    for (const Edge& e : g.edges()) s.edges.insert({e.from, e.to});
    return s;
}

// y = (x - 50)^2 via product of two centered copies; minimum at x = 50.
ComputationalGraph quadratic_graph() {
    return ComputationalGraph::Builder{}
        .input("x")
        .compute("c1", OperatorSpec::center(50.0))
        .compute("c2", OperatorSpec::center(50.0))
        .output("y", OperatorSpec::product())
        .edge("x", "c1")
        .edge("x", "c2")
        .edge("c1", "y")
        .edge("c2", "y")
        .build();
}

}  // namespace

TEST_CASE("derive_affine_closed_form extracts the feature path coefficient") {
    ComputationalGraph g = linear_graph();
    Subgraph path{{"x1"}, {"y"}, {"x1", "y"}, {{"x1", "y"}}};
    AffineForm f = derive_affine_closed_form(g, path);
    REQUIRE(f.coefficients.size() == 1);
    CHECK(f.coefficients.at("x1") == 2.0);
    CHECK(f.offset == 1.0);

    AffineForm full = derive_affine_closed_form(g, whole(g));
    CHECK(full.coefficients.at("x1") == 2.0);
    CHECK(full.coefficients.at("x2") == 3.0);
    CHECK(full.offset == 1.0);
}

TEST_CASE("derive_affine_closed_form handles center and constant-scaled products") {
    ComputationalGraph g = ComputationalGraph::Builder{}
                               .input("age")
                               .compute("age_c", OperatorSpec::center(56.1))
                               .compute("k", OperatorSpec::constant(0.5))
                               .output("y", OperatorSpec::product())
                               .edge("age", "age_c")
                               .edge("age_c", "y")
                               .edge("k", "y")
                               .build();
    AffineForm f = derive_affine_closed_form(g, whole(g));
    CHECK(f.coefficients.at("age") == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f.offset == doctest::Approx(-0.5 * 56.1).epsilon(1e-15));
}

TEST_CASE("derive_affine_closed_form rejects non-affine subgraphs") {
    ComputationalGraph g = ComputationalGraph::Builder{}
                               .input("x")
                               .output("y", OperatorSpec::exponential())
                               .edge("x", "y")
                               .build();
    try {
        derive_affine_closed_form(g, whole(g));
        FAIL("expected NotAffine");
    } catch (const RuntimeError& e) {
        CHECK(e.code() == "NotAffine");
        CHECK(std::string(e.what()).find("y") != std::string::npos);
    }
    CHECK_THROWS_AS(derive_affine_closed_form(quadratic_graph(), whole(quadratic_graph())),
                    RuntimeError);
}

TEST_CASE("coefficient_equals on an edge") {
    ComputationalGraph g = linear_graph();
    EvidenceCheck c;
    c.id = "c1";
    c.kind = CheckKind::coefficient_equals;
    c.target.edge = EdgeRef{"x1", "y"};
    c.expected["value"] = 2.0;
    CHECK(run_check(g, c).status == CheckStatus::pass);
    c.expected["value"] = 2.1;
    CHECK(run_check(g, c).status == CheckStatus::fail);
}

TEST_CASE("hazard_ratio_equals uses the 0.005 default tolerance") {
    ComputationalGraph g = ComputationalGraph::Builder{}
                               .input("x")
                               .output("eta", OperatorSpec::weighted_sum())
                               .edge("x", "eta", 0.0756)
                               .build();
    EvidenceCheck c;
    c.id = "hr";
    c.kind = CheckKind::hazard_ratio_equals;
    c.target.edge = EdgeRef{"x", "eta"};
    c.expected["value"] = 1.078;
    VerificationResult r = run_check(g, c);
    CHECK(r.status == CheckStatus::pass);
    CHECK(r.measured.at("hazard_ratio") == doctest::Approx(std::exp(0.0756)));
    c.expected["value"] = 1.09;
    CHECK(run_check(g, c).status == CheckStatus::fail);
}

TEST_CASE("closed_form_affine compares full coefficient maps") {
    ComputationalGraph g = linear_graph();
    EvidenceCheck c;
    c.id = "cf";
    c.kind = CheckKind::closed_form_affine;
    c.target.subgraph = whole(g);
    c.expected = {{"x1", 2.0}, {"x2", 3.0}};
    c.expected_offset = 1.0;
    CHECK(run_check(g, c).status == CheckStatus::pass);

    c.expected = {{"x1", 2.0}};  // silently dropping x2 must fail
    CHECK(run_check(g, c).status == CheckStatus::fail);
}

TEST_CASE("extremum_at finds the quadratic minimum") {
    ComputationalGraph g = quadratic_graph();
    EvidenceCheck c;
    c.id = "ext";
    c.kind = CheckKind::extremum_at;
    c.target.subgraph = whole(g);
    c.x_star = 50.0;
    c.extremum = "min";
    CHECK(run_check(g, c).status == CheckStatus::pass);
    c.x_star = 60.0;
    CHECK(run_check(g, c).status == CheckStatus::fail);
    c.x_star = 50.0;
    c.extremum = "max";
    CHECK(run_check(g, c).status == CheckStatus::fail);
}

TEST_CASE("monotonic_on checks grid differences") {
    ComputationalGraph g = ComputationalGraph::Builder{}
                               .input("x")
                               .output("y", OperatorSpec::sigmoid())
                               .edge("x", "y")
                               .build();
    EvidenceCheck c;
    c.id = "mono";
    c.kind = CheckKind::monotonic_on;
    c.target.subgraph = whole(g);
    c.direction = "increasing";
    c.samples = 25;
    c.inputs = {{"x", -6.0, 6.0, {}}};
    CHECK(run_check(g, c).status == CheckStatus::pass);
    c.direction = "decreasing";
    CHECK(run_check(g, c).status == CheckStatus::fail);
}

TEST_CASE("additivity holds for linear outputs and fails across a product") {
    ComputationalGraph g = linear_graph();
    EvidenceCheck c;
    c.id = "add";
    c.kind = CheckKind::additivity;
    c.output = "y";
    c.samples = 30;
    c.seed = 99;
    c.fixed = {{"x1", 0.0}, {"x2", 0.0}};
    c.inputs = {{"x1", -5.0, 5.0, {}}, {"x2", -5.0, 5.0, {}}};
    CHECK(run_check(g, c).status == CheckStatus::pass);

    ComputationalGraph q = ComputationalGraph::Builder{}
                               .input("a")
                               .input("b")
                               .output("y", OperatorSpec::product())
                               .edge("a", "y")
                               .edge("b", "y")
                               .build();
    c.fixed = {{"a", 1.0}, {"b", 1.0}};
    c.inputs = {{"a", 2.0, 5.0, {}}, {"b", 2.0, 5.0, {}}};
    CHECK(run_check(q, c).status == CheckStatus::fail);
}

TEST_CASE("ablation_delta measures the removed contribution") {
    ComputationalGraph g = linear_graph();
    EvidenceCheck c;
    c.id = "abl";
    c.kind = CheckKind::ablation_delta;
    c.target.subgraph = Subgraph{{"x2"}, {"x2"}, {"x2"}, {}};
    c.output = "y";
    c.samples = 5;
    c.seed = 3;
    c.fixed = {{"x1", 1.0}, {"x2", 4.0}};
    c.expected["value"] = 12.0;  // zeroing x2 removes 3 * 4
    c.tolerance = 1e-12;
    CHECK(run_check(g, c).status == CheckStatus::pass);
    c.expected["value"] = 11.0;
    CHECK(run_check(g, c).status == CheckStatus::fail);
}

TEST_CASE("perturbation_slope recovers linear coefficients") {
    ComputationalGraph g = linear_graph();
    EvidenceCheck c;
    c.id = "slope";
    c.kind = CheckKind::perturbation_slope;
    c.output = "y";
    c.vary = "x2";
    c.samples = 4;
    c.seed = 5;
    c.fixed = {{"x1", 0.5}, {"x2", 1.5}};
    c.expected["value"] = 3.0;
    c.tolerance = 1e-6;
    CHECK(run_check(g, c).status == CheckStatus::pass);
}

TEST_CASE("io_surrogate_fit matches the symbolic affine form") {
    ComputationalGraph g = linear_graph();
    EvidenceCheck c;
    c.id = "fit";
    c.kind = CheckKind::io_surrogate_fit;
    c.target.subgraph = whole(g);
    c.samples = 50;
    c.seed = 17;
    c.inputs = {{"x1", -10.0, 10.0, {}}, {"x2", -10.0, 10.0, {}}};
    c.tolerance = 1e-8;
    VerificationResult r = run_check(g, c);
    REQUIRE(r.status == CheckStatus::pass);

    AffineForm f = derive_affine_closed_form(g, whole(g));
    CHECK(std::abs(r.measured.at("coef:x1") - f.coefficients.at("x1")) <= 1e-8);
    CHECK(std::abs(r.measured.at("coef:x2") - f.coefficients.at("x2")) <= 1e-8);
    CHECK(std::abs(r.measured.at("offset") - f.offset) <= 1e-8);
}

TEST_CASE("substitution_equiv with an affine surrogate") {
    ComputationalGraph g = ComputationalGraph::Builder{}
                               .input("x")
                               .compute("h", OperatorSpec::affine(2.0, 1.0))
                               .output("y", OperatorSpec::affine(3.0, 0.0))
                               .edge("x", "h")
                               .edge("h", "y")
                               .build();
    EvidenceCheck c;
    c.id = "sub";
    c.kind = CheckKind::substitution_equiv;
    c.target.subgraph = Subgraph{{"x"}, {"h"}, {"x", "h"}, {{"x", "h"}}};
    c.output = "y";
    c.samples = 20;
    c.seed = 8;
    c.inputs = {{"x", -3.0, 3.0, {}}};
    c.surrogate_family = "affine";
    c.surrogate.coefficients = {{"x", 2.0}};
    c.surrogate.offset = 1.0;
    CHECK(run_check(g, c).status == CheckStatus::pass);
    c.surrogate.offset = 1.5;
    CHECK(run_check(g, c).status == CheckStatus::fail);
}

TEST_CASE("substitution_equiv with the cox_risk surrogate family") {
    ComputationalGraph g = ComputationalGraph::Builder{}
                               .input("eta")
                               .compute("e", OperatorSpec::exponential())
                               .compute("s", OperatorSpec::power_base(0.9832))
                               .output("risk", OperatorSpec::one_minus())
                               .edge("eta", "e")
                               .edge("e", "s")
                               .edge("s", "risk")
                               .build();
    EvidenceCheck c;
    c.id = "cox";
    c.kind = CheckKind::substitution_equiv;
    c.target.subgraph =
        Subgraph{{"eta"}, {"risk"}, {"eta", "e", "s", "risk"},
                 {{"eta", "e"}, {"e", "s"}, {"s", "risk"}}};
    c.output = "risk";
    c.samples = 20;
    c.seed = 8;
    c.inputs = {{"eta", -2.0, 2.0, {}}};
    c.surrogate_family = "cox_risk";
    c.baseline_survival = 0.9832;
    CHECK(run_check(g, c).status == CheckStatus::pass);
    c.baseline_survival = 0.97;
    CHECK(run_check(g, c).status == CheckStatus::fail);
}

TEST_CASE("mutual_exclusivity over indicator nodes") {
    ComputationalGraph g = ComputationalGraph::Builder{}
                               .input("smk")
                               .compute("i0", OperatorSpec::indicator(0.0))
                               .compute("i1", OperatorSpec::indicator(1.0))
                               .compute("i2", OperatorSpec::indicator(2.0))
                               .output("y", OperatorSpec::weighted_sum())
                               .edge("smk", "i0")
                               .edge("smk", "i1")
                               .edge("smk", "i2")
                               .edge("i0", "y", 0.0)
                               .edge("i1", "y", 0.1)
                               .edge("i2", "y", 0.6)
                               .build();
    EvidenceCheck c;
    c.id = "mx";
    c.kind = CheckKind::mutual_exclusivity;
    c.target.node_list = {"i0", "i1", "i2"};
    c.samples = 50;
    c.seed = 21;
    c.inputs = {{"smk", 0.0, 0.0, {0.0, 1.0, 2.0}}};
    CHECK(run_check(g, c).status == CheckStatus::pass);

    // A value outside the category set activates no indicator.
    c.inputs = {{"smk", 0.0, 0.0, {0.0, 1.0, 2.0, 3.0}}};
    CHECK(run_check(g, c).status == CheckStatus::fail);
}

TEST_CASE("empirical checks are deterministic for a fixed seed") {
    ComputationalGraph g = linear_graph();
    EvidenceCheck c;
    c.id = "fit";
    c.kind = CheckKind::io_surrogate_fit;
    c.target.subgraph = whole(g);
    c.samples = 40;
    c.seed = 123;
    c.inputs = {{"x1", -1.0, 1.0, {}}, {"x2", -1.0, 1.0, {}}};
    VerificationResult a = run_check(g, c);
    VerificationResult b = run_check(g, c);
    CHECK(a.measured == b.measured);
    c.seed = 124;
    VerificationResult d = run_check(g, c);
    CHECK(a.measured.at("coef:x1") == doctest::Approx(d.measured.at("coef:x1")).epsilon(1e-9));
}

TEST_CASE("evaluate_subgraph restricts computation to subgraph edges") {
    ComputationalGraph g = ComputationalGraph::Builder{}
                               .input("a")
                               .input("b")
                               .output("y", OperatorSpec::weighted_sum())
                               .edge("a", "y", 2.0)
                               .edge("b", "y", 5.0)
                               .build();
    Subgraph only_a{{"a"}, {"y"}, {"a", "y"}, {{"a", "y"}}};
    ActivationMap acts = evaluate_subgraph(g, only_a, {{"a", 3.0}});
    CHECK(acts.at("y") == 6.0);  // the (b, y) edge is outside the subgraph
}

TEST_CASE("a broken check errors in isolation") {
    ComputationalGraph g = linear_graph();

    AnnotationBundle bundle;
    bundle.context = {"devs", "English", "unit test"};
    LeafAnnotation leaf;
    leaf.id = "A1";
    leaf.subgraph = whole(g);
    leaf.hypothesis = "the model is affine in both features";

    EvidenceCheck good;
    good.id = "A1.good";
    good.kind = CheckKind::coefficient_equals;
    good.target.edge = EdgeRef{"x1", "y"};
    good.expected["value"] = 2.0;

    EvidenceCheck broken;
    broken.id = "A1.broken";
    broken.kind = CheckKind::coefficient_equals;
    broken.target.edge = EdgeRef{"nope", "y"};
    broken.expected["value"] = 1.0;

    leaf.evidence = {good, broken};
    bundle.leaves = {leaf};
    bundle.root = "A1";

    auto results = verify_bundle(g, bundle);
    CHECK(results.at("A1.good").status == CheckStatus::pass);
    CHECK(results.at("A1.broken").status == CheckStatus::error);
    CHECK_FALSE(results.at("A1.broken").diagnostics.empty());
}

TEST_CASE("exp and power_base agree where they should") {
    // power_base(e) must equal exponential, and exp(ln S0 * z) = S0^z.
    ComputationalGraph g = ComputationalGraph::Builder{}
                               .input("z")
                               .compute("p", OperatorSpec::power_base(0.9748))
                               .output("e", OperatorSpec::exponential())
                               .edge("z", "p")
                               .edge("z", "e", std::log(0.9748))
                               .build();
    for (double z : {-2.0, -0.5, 0.0, 0.7, 3.1}) {
        ActivationMap acts = evaluate(g, {{"z", z}});
        CHECK(acts.at("p") == doctest::Approx(acts.at("e")).epsilon(1e-12));
    }
}

TEST_CASE("kind defaults: tolerance zero falls back to the kind default") {
    CHECK(default_tolerance(CheckKind::hazard_ratio_equals) == 0.005);
    CHECK(default_tolerance(CheckKind::coefficient_equals) == 1e-6);
    CHECK(default_tolerance(CheckKind::closed_form_affine) == 1e-6);
    CHECK(default_tolerance(CheckKind::additivity) == 1e-9);
    CHECK(default_tolerance(CheckKind::substitution_equiv) == 1e-9);
}
