#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "annotex/formats.hpp"

using namespace annotex;

namespace {

using json = nlohmann::ordered_json;

bool use_color() {
    if (std::getenv("ANNOTEX_NO_COLOR")) return false;
    return true;
}

std::string colored(const std::string& text, const char* code) {
    if (!use_color()) return text;
    return std::string("\033[") + code + "m" + text + "\033[0m";
}

std::string status_word(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return colored("pass", "32");
        case CheckStatus::fail: return colored("FAIL", "31");
        case CheckStatus::error: return colored("ERROR", "31");
    }
    return "?";
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) std::cout << text;
    else write_file(out_path, text);
}

std::vector<double> parse_csv_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ParseError("SyntaxError", "'" + item + "' is not a number");
        }
    }
    return out;
}

std::vector<int> parse_csv_ints(const std::string& csv) {
    std::vector<int> out;
    for (double v : parse_csv_doubles(csv)) out.push_back(static_cast<int>(v));
    return out;
}

// Checks that do not pin their own seed inherit the CLI seed.
void apply_cli_seed(AnnotationBundle& b, std::uint64_t seed) {
    auto apply = [seed](std::vector<EvidenceCheck>& checks) {
        for (EvidenceCheck& c : checks)
            if (c.seed == 0) c.seed = seed;
    };
    for (LeafAnnotation& a : b.leaves) apply(a.evidence);
    for (CompositionAnnotation& a : b.compositions) apply(a.evidence);
}

ActivationMap parse_values_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("SyntaxError", "input values are not valid JSON");
    if (!j.is_object()) throw ParseError("SchemaError", "expected an object of input values");
    ActivationMap m;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number()) throw ParseError("SchemaError", "/" + k + ": expected a number");
        m[k] = v.get<double>();
    }
    return m;
}

int run(int argc, char** argv) {
    CLI::App app{"verification toolkit for annotated computational graphs"};
    app.require_subcommand(1);

    std::string graph_path, bundle_path, out_path, format = "json";
    int arity_warn = 10;
    std::uint64_t cli_seed = 42;

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a graph on given inputs");
    std::string inputs_path;
    eval_cmd->add_option("--graph", graph_path, "graph file")->required();
    eval_cmd->add_option("--inputs", inputs_path, "JSON object of input values, inline or a file")
        ->required();
    eval_cmd->add_option("--out", out_path, "output path (default stdout)");

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "5-year cardiovascular risk for a patient");
    std::string patient_path;
    predict_cmd->add_option("--patient", patient_path, "patient file")->required();
    predict_cmd->add_option("--out", out_path, "output path (default stdout)");

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "generate graphs and bundles");
    gen_cmd->require_subcommand(1);
    std::string graph_out, bundle_out;
    std::string coefficients_csv, layers_csv = "4,8,2", tree_path, sex_str = "women";
    double intercept = 0.0;
    std::uint64_t seed = 42;

    auto* gen_reg = gen_cmd->add_subcommand("regression", "annotated linear regression");
    gen_reg->add_option("--coefficients", coefficients_csv, "comma separated weights")
        ->required();
    gen_reg->add_option("--intercept", intercept, "intercept term");
    gen_reg->add_option("--graph-out", graph_out, "graph output path")->required();
    gen_reg->add_option("--bundle-out", bundle_out, "bundle output path");

    auto* gen_tree = gen_cmd->add_subcommand("tree", "annotated decision tree");
    gen_tree->add_option("--spec", tree_path, "tree spec file")->required();
    gen_tree->add_option("--graph-out", graph_out, "graph output path")->required();
    gen_tree->add_option("--bundle-out", bundle_out, "bundle output path");

    auto* gen_mlp = gen_cmd->add_subcommand("mlp", "dense relu network (no bundle)");
    gen_mlp->add_option("--layers", layers_csv, "comma separated layer sizes");
    gen_mlp->add_option("--seed", seed, "weight RNG seed");
    gen_mlp->add_option("--graph-out", graph_out, "graph output path")->required();

    auto* gen_cvd = gen_cmd->add_subcommand("cvd", "annotated cardiovascular risk model");
    gen_cvd->add_option("--sex", sex_str, "women or men");
    gen_cvd->add_option("--graph-out", graph_out, "graph output path")->required();
    gen_cvd->add_option("--bundle-out", bundle_out, "bundle output path");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "run every evidence check");
    verify_cmd->add_option("--graph", graph_path, "graph file")->required();
    verify_cmd->add_option("--bundle", bundle_path, "bundle file")->required();
    verify_cmd->add_option("--seed", cli_seed, "seed for checks that do not pin one");

    // coverage
    auto* coverage_cmd = app.add_subcommand("coverage", "structural and compositional coverage");
    coverage_cmd->add_option("--graph", graph_path, "graph file")->required();
    coverage_cmd->add_option("--bundle", bundle_path, "bundle file")->required();
    coverage_cmd->add_option("--out", out_path, "output path (default stdout)");
    coverage_cmd->add_option("--seed", cli_seed, "seed for checks that do not pin one");

    // criterion
    auto* criterion_cmd = app.add_subcommand("criterion", "explainability verdict plus report");
    criterion_cmd->add_option("--graph", graph_path, "graph file")->required();
    criterion_cmd->add_option("--bundle", bundle_path, "bundle file")->required();
    criterion_cmd->add_option("--format", format, "json or md")
        ->check(CLI::IsMember({"json", "md"}));
    criterion_cmd->add_option("--out", out_path, "report output path");
    criterion_cmd->add_option("--arity-warn", arity_warn, "flat composition warning threshold");
    criterion_cmd->add_option("--seed", cli_seed, "seed for checks that do not pin one");

    // metrics
    auto* metrics_cmd = app.add_subcommand("metrics", "graph size and search space metrics");
    metrics_cmd->add_option("--graph", graph_path, "graph file")->required();
    metrics_cmd->add_option("--out", out_path, "output path (default stdout)");

    // report
    auto* report_cmd = app.add_subcommand("report", "full verification report");
    report_cmd->add_option("--graph", graph_path, "graph file")->required();
    report_cmd->add_option("--bundle", bundle_path, "bundle file")->required();
    report_cmd->add_option("--format", format, "json or md")
        ->check(CLI::IsMember({"json", "md"}));
    report_cmd->add_option("--out", out_path, "output path (default stdout)");
    report_cmd->add_option("--arity-warn", arity_warn, "flat composition warning threshold");
    report_cmd->add_option("--seed", cli_seed, "seed for checks that do not pin one");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (eval_cmd->parsed()) {
        ComputationalGraph g = parse_graph_json(read_file(graph_path));
        // Inline JSON or a path to a file holding it.
        bool inline_json = !inputs_path.empty() && inputs_path.front() == '{';
        ActivationMap inputs = parse_values_json(inline_json ? inputs_path
                                                             : read_file(inputs_path));
        ActivationMap acts = evaluate(g, inputs);
        json j;
        for (const NodeId& id : g.output_ids()) j[id] = acts.at(id);
        emit(j.dump(2) + "\n", out_path);
        return 0;
    }

    if (predict_cmd->parsed()) {
        PatientFile f = parse_patient_json(read_file(patient_path));
        std::vector<std::string> warnings = validate_patient(f.patient);
        json j;
        j["sex"] = sex_name(f.sex);
        j["linear_predictor"] = linear_predictor(f.sex, f.patient);
        j["risk_5y"] = predict_risk(f.sex, f.patient);
        json clusters;
        for (const auto& [k, v] : cluster_contributions(f.sex, f.patient)) clusters[k] = v;
        j["cluster_contributions"] = clusters;
        j["warnings"] = warnings;
        emit(j.dump(2) + "\n", out_path);
        return 0;
    }

    if (gen_cmd->parsed()) {
        if (gen_reg->parsed()) {
            AnnotatedModel m = build_linear_regression(parse_csv_doubles(coefficients_csv),
                                                       intercept);
            write_file(graph_out, graph_to_json(m.graph));
            if (!bundle_out.empty()) write_file(bundle_out, bundle_to_json(m.bundle));
        } else if (gen_tree->parsed()) {
            AnnotatedModel m = build_decision_tree(parse_tree_spec_json(read_file(tree_path)));
            write_file(graph_out, graph_to_json(m.graph));
            if (!bundle_out.empty()) write_file(bundle_out, bundle_to_json(m.bundle));
        } else if (gen_mlp->parsed()) {
            write_file(graph_out, graph_to_json(build_dense_mlp(parse_csv_ints(layers_csv),
                                                                seed)));
        } else if (gen_cvd->parsed()) {
            auto sex = sex_from_name(sex_str);
            if (!sex) throw ParseError("SchemaError", "unknown sex '" + sex_str + "'");
            AnnotatedModel m = build_predict(*sex);
            write_file(graph_out, graph_to_json(m.graph));
            if (!bundle_out.empty()) write_file(bundle_out, bundle_to_json(m.bundle));
        }
        return 0;
    }

    if (verify_cmd->parsed()) {
        ComputationalGraph g = parse_graph_json(read_file(graph_path));
        AnnotationBundle b = parse_bundle_json(read_file(bundle_path));
        apply_cli_seed(b, cli_seed);
        validate_bundle(g, b);
        auto results = verify_bundle(g, b);
        bool all_pass = true;
        for (const auto& [id, r] : results) {
            std::cout << status_word(r.status) << "  " << id;
            if (!r.diagnostics.empty()) std::cout << "  (" << r.diagnostics << ")";
            std::cout << "\n";
            if (r.status != CheckStatus::pass) all_pass = false;
        }
        return all_pass ? 0 : 1;
    }

    if (coverage_cmd->parsed()) {
        ComputationalGraph g = parse_graph_json(read_file(graph_path));
        AnnotationBundle b = parse_bundle_json(read_file(bundle_path));
        apply_cli_seed(b, cli_seed);
        validate_bundle(g, b);
        auto results = verify_bundle(g, b);
        CoverageReport cov = explainedness(g, b, results);
        char line[64];
        std::snprintf(line, sizeof(line), "structural %.3f\ncompositional %.3f\n",
                      cov.structural, cov.compositional);
        std::cout << line;
        for (const NodeId& id : cov.uncovered_nodes) std::cout << "uncovered: " << id << "\n";
        for (const std::string& id : cov.unverified_compositions)
            std::cout << "unverified: " << id << "\n";
        if (!out_path.empty()) {
            json j;
            j["structural"] = cov.structural;
            j["compositional"] = cov.compositional;
            j["uncovered_nodes"] = cov.uncovered_nodes;
            j["unverified_compositions"] = cov.unverified_compositions;
            write_file(out_path, j.dump(2) + "\n");
        }
        return 0;
    }

    if (criterion_cmd->parsed()) {
        ComputationalGraph g = parse_graph_json(read_file(graph_path));
        AnnotationBundle b = parse_bundle_json(read_file(bundle_path));
        apply_cli_seed(b, cli_seed);
        Report r = make_report(g, b, arity_warn);
        if (!out_path.empty())
            write_file(out_path, format == "md" ? report_to_markdown(r) : report_to_json(r));
        std::cout << (r.verdict.explainable ? "EXPLAINABLE" : "NOT EXPLAINABLE") << "\n";
        for (const auto& [what, detail] : r.verdict.failures)
            std::cout << "- " << what << ": " << detail << "\n";
        for (const NodeId& id : r.coverage.uncovered_nodes)
            std::cout << "uncovered: " << id << "\n";
        return r.verdict.explainable ? 0 : 1;
    }

    if (metrics_cmd->parsed()) {
        Metrics m = graph_metrics(parse_graph_json(read_file(graph_path)));
        json j;
        j["nodes"] = m.num_nodes;
        j["edges"] = m.num_edges;
        j["log2_subgraph_space"] = m.log2_subgraph_space;
        j["magnitude_exponent"] = m.magnitude_exponent;
        j["magnitude_mantissa"] = m.magnitude_mantissa;
        j["max_fan_out"] = m.max_fan_out;
        j["density"] = m.density;
        emit(j.dump(2) + "\n", out_path);
        return 0;
    }

    if (report_cmd->parsed()) {
        ComputationalGraph g = parse_graph_json(read_file(graph_path));
        AnnotationBundle b = parse_bundle_json(read_file(bundle_path));
        apply_cli_seed(b, cli_seed);
        Report r = make_report(g, b, arity_warn);
        emit(format == "md" ? report_to_markdown(r) : report_to_json(r), out_path);
        return r.verdict.explainable ? 0 : 1;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
