#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "annotex/formats.hpp"

namespace py = pybind11;
using namespace annotex;

namespace {

py::dict metrics_dict(const Metrics& m) {
    py::dict d;
    d["nodes"] = m.num_nodes;
    d["edges"] = m.num_edges;
    d["log2_subgraph_space"] = m.log2_subgraph_space;
    d["magnitude_exponent"] = m.magnitude_exponent;
    d["magnitude_mantissa"] = m.magnitude_mantissa;
    d["max_fan_out"] = m.max_fan_out;
    d["density"] = m.density;
    return d;
}

py::dict result_dict(const VerificationResult& r) {
    py::dict d;
    d["id"] = r.check_id;
    d["status"] = check_status_name(r.status);
    d["measured"] = r.measured;
    d["expected"] = r.expected;
    d["diagnostics"] = r.diagnostics;
    return d;
}

Sex sex_arg(const std::string& name) {
    auto s = sex_from_name(name);
    if (!s) throw RuntimeError("BadArgument", "unknown sex '" + name + "'");
    return *s;
}

}  // namespace

PYBIND11_MODULE(_annotex, m) {
    m.doc() = "verification toolkit for annotated computational graphs";

    py::register_exception<ParseError>(m, "ParseError");
    py::register_exception<RuntimeError>(m, "RuntimeError");

    py::class_<ComputationalGraph>(m, "Graph")
        .def("__repr__", [](const ComputationalGraph& g) {
            return "<annotex.Graph " + std::to_string(g.nodes().size()) + " nodes, " +
                   std::to_string(g.edges().size()) + " edges>";
        });
    py::class_<AnnotationBundle>(m, "Bundle").def("__repr__", [](const AnnotationBundle& b) {
        return "<annotex.Bundle " + std::to_string(b.leaves.size()) + " leaves, " +
               std::to_string(b.compositions.size()) + " compositions>";
    });

    m.def("parse_graph", &parse_graph_json, py::arg("text"));
    m.def("graph_to_json", &graph_to_json, py::arg("graph"));
    m.def("parse_bundle", &parse_bundle_json, py::arg("text"));
    m.def("bundle_to_json", &bundle_to_json, py::arg("bundle"));
    m.def("graph_digest", &graph_digest, py::arg("graph"));

    m.def(
        "evaluate",
        [](const ComputationalGraph& g, const ActivationMap& inputs) {
            return evaluate(g, inputs);
        },
        py::arg("graph"), py::arg("inputs"));

    m.def(
        "metrics",
        [](const ComputationalGraph& g) { return metrics_dict(graph_metrics(g)); },
        py::arg("graph"));

    m.def(
        "verify",
        [](const ComputationalGraph& g, const AnnotationBundle& b) {
            validate_bundle(g, b);
            py::list out;
            for (const auto& [_, r] : verify_bundle(g, b)) out.append(result_dict(r));
            return out;
        },
        py::arg("graph"), py::arg("bundle"));

    m.def(
        "coverage",
        [](const ComputationalGraph& g, const AnnotationBundle& b) {
            validate_bundle(g, b);
            auto results = verify_bundle(g, b);
            CoverageReport cov = explainedness(g, b, results);
            py::dict d;
            d["structural"] = cov.structural;
            d["compositional"] = cov.compositional;
            d["uncovered_nodes"] = cov.uncovered_nodes;
            d["unverified_compositions"] = cov.unverified_compositions;
            return d;
        },
        py::arg("graph"), py::arg("bundle"));

    m.def(
        "criterion",
        [](const ComputationalGraph& g, const AnnotationBundle& b) {
            validate_bundle(g, b);
            auto results = verify_bundle(g, b);
            Verdict v = explainability_criterion(g, b, results);
            py::dict d;
            d["well_formed"] = v.well_formed;
            d["all_evidence_verified"] = v.all_evidence_verified;
            d["explainable"] = v.explainable;
            d["failures"] = v.failures;
            return d;
        },
        py::arg("graph"), py::arg("bundle"));

    m.def(
        "report_json",
        [](const ComputationalGraph& g, const AnnotationBundle& b, int arity_warn) {
            return report_to_json(make_report(g, b, arity_warn));
        },
        py::arg("graph"), py::arg("bundle"), py::arg("arity_warn") = 10);
    m.def(
        "report_markdown",
        [](const ComputationalGraph& g, const AnnotationBundle& b, int arity_warn) {
            return report_to_markdown(make_report(g, b, arity_warn));
        },
        py::arg("graph"), py::arg("bundle"), py::arg("arity_warn") = 10);

    m.def(
        "build_regression",
        [](const std::vector<double>& coefficients, double intercept) {
            AnnotatedModel m2 = build_linear_regression(coefficients, intercept);
            return py::make_tuple(m2.graph, m2.bundle);
        },
        py::arg("coefficients"), py::arg("intercept") = 0.0);
    m.def(
        "build_tree",
        [](const std::string& spec_json) {
            AnnotatedModel m2 = build_decision_tree(parse_tree_spec_json(spec_json));
            return py::make_tuple(m2.graph, m2.bundle);
        },
        py::arg("spec_json"));
    m.def("build_mlp", &build_dense_mlp, py::arg("layer_sizes"), py::arg("seed") = 42);
    m.def(
        "build_cvd",
        [](const std::string& sex) {
            AnnotatedModel m2 = build_predict(sex_arg(sex));
            return py::make_tuple(m2.graph, m2.bundle);
        },
        py::arg("sex"));

    m.def(
        "predict_patient",
        [](const std::string& patient_json) {
            PatientFile f = parse_patient_json(patient_json);
            auto warnings = validate_patient(f.patient);
            py::dict d;
            d["sex"] = sex_name(f.sex);
            d["linear_predictor"] = linear_predictor(f.sex, f.patient);
            d["risk_5y"] = predict_risk(f.sex, f.patient);
            d["cluster_contributions"] = cluster_contributions(f.sex, f.patient);
            d["warnings"] = warnings;
            return d;
        },
        py::arg("patient_json"));

    m.attr("__version__") = kToolVersion;
}
