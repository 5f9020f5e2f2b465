#include "annotex/formats.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace annotex {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
    throw schema_error(path + ": " + msg);
}

const json& field(const json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) bad(path, std::string("missing required key '") + key + "'");
    return *it;
}

void reject_unknown(const json& j, const std::string& path,
                    const std::set<std::string>& allowed) {
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) bad(path, "unknown key '" + key + "'");
}

const json& as_object(const json& j, const std::string& path) {
    if (!j.is_object()) bad(path, "expected an object");
    return j;
}

const json& as_array(const json& j, const std::string& path) {
    if (!j.is_array()) bad(path, "expected an array");
    return j;
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) bad(path, "expected a string");
    return j.get<std::string>();
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) bad(path, "expected a number");
    return j.get<double>();
}

std::int64_t as_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) bad(path, "expected an integer");
    return j.get<std::int64_t>();
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) bad(path, "expected a boolean");
    return j.get<bool>();
}

json parse_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw syntax_error("input is not valid JSON");
    return j;
}

// Operators

json op_to_json(const OperatorSpec& op) {
    json j;
    j["kind"] = op_kind_name(op.kind);
    switch (op.kind) {
        case OpKind::constant: j["value"] = op.value; break;
        case OpKind::affine:
            j["scale"] = op.scale;
            j["offset"] = op.offset;
            break;
        case OpKind::center: j["mean"] = op.mean; break;
        case OpKind::indicator: j["category"] = op.category; break;
        case OpKind::threshold:
            j["position"] = op.position;
            j["cutoff"] = op.cutoff;
            j["less_equal"] = op.less_equal;
            break;
        case OpKind::power_base: j["base"] = op.base; break;
        default: break;
    }
    return j;
}

OperatorSpec op_from_json(const json& j, const std::string& path) {
    as_object(j, path);
    std::string kind = as_string(field(j, path, "kind"), path + "/kind");
    auto k = op_kind_from_name(kind);
    if (!k) bad(path + "/kind", "unknown operator '" + kind + "'");
    std::set<std::string> allowed = {"kind"};
    OperatorSpec op;
    op.kind = *k;
    switch (*k) {
        case OpKind::constant:
            allowed.insert("value");
            op.value = as_number(field(j, path, "value"), path + "/value");
            break;
        case OpKind::affine:
            allowed.insert({"scale", "offset"});
            op.scale = as_number(field(j, path, "scale"), path + "/scale");
            op.offset = as_number(field(j, path, "offset"), path + "/offset");
            break;
        case OpKind::center:
            allowed.insert("mean");
            op.mean = as_number(field(j, path, "mean"), path + "/mean");
            break;
        case OpKind::indicator:
            allowed.insert("category");
            op.category = as_number(field(j, path, "category"), path + "/category");
            break;
        case OpKind::threshold:
            allowed.insert({"position", "cutoff", "less_equal"});
            op.position =
                static_cast<int>(as_integer(field(j, path, "position"), path + "/position"));
            op.cutoff = as_number(field(j, path, "cutoff"), path + "/cutoff");
            if (j.contains("less_equal"))
                op.less_equal = as_bool(j["less_equal"], path + "/less_equal");
            break;
        case OpKind::power_base:
            allowed.insert("base");
            op.base = as_number(field(j, path, "base"), path + "/base");
            break;
        default: break;
    }
    reject_unknown(j, path, allowed);
    return op;
}

// Subgraphs

json subgraph_to_json(const Subgraph& s) {
    json j;
    j["entry"] = s.entry;
    j["exit"] = s.exit;
    j["nodes"] = s.nodes;
    json edges = json::array();
    for (const EdgeRef& e : s.edges) edges.push_back({e.first, e.second});
    j["edges"] = edges;
    return j;
}

std::set<NodeId> id_set(const json& j, const std::string& path) {
    as_array(j, path);
    std::set<NodeId> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.insert(as_string(j[i], path + "/" + std::to_string(i)));
    return out;
}

Subgraph subgraph_from_json(const json& j, const std::string& path) {
    as_object(j, path);
    reject_unknown(j, path, {"entry", "exit", "nodes", "edges"});
    Subgraph s;
    s.entry = id_set(field(j, path, "entry"), path + "/entry");
    s.exit = id_set(field(j, path, "exit"), path + "/exit");
    s.nodes = id_set(field(j, path, "nodes"), path + "/nodes");
    const json& edges = as_array(field(j, path, "edges"), path + "/edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        std::string p = path + "/edges/" + std::to_string(i);
        const json& e = as_array(edges[i], p);
        if (e.size() != 2) bad(p, "expected an [from, to] pair");
        s.edges.insert({as_string(e[0], p + "/0"), as_string(e[1], p + "/1")});
    }
    return s;
}

// Evidence checks

json number_map_to_json(const std::map<std::string, double>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

json check_to_json(const EvidenceCheck& c) {
    json j;
    j["id"] = c.id;
    j["kind"] = check_kind_name(c.kind);
    j["mode"] = c.mode == CheckMode::analytical ? "analytical" : "empirical";
    json target = json::object();
    if (c.target.edge) target["edge"] = {c.target.edge->first, c.target.edge->second};
    if (c.target.node) target["node"] = *c.target.node;
    if (c.target.subgraph) target["subgraph"] = subgraph_to_json(*c.target.subgraph);
    if (!c.target.node_list.empty()) target["nodes"] = c.target.node_list;
    j["target"] = target;
    json p = json::object();
    if (!c.expected.empty()) p["expected"] = number_map_to_json(c.expected);
    if (c.expected_offset) p["expected_offset"] = *c.expected_offset;
    if (c.tolerance > 0.0) p["tolerance"] = c.tolerance;
    if (c.step != 1e-4) p["step"] = c.step;
    if (c.derivative_tol != 1e-3) p["derivative_tol"] = c.derivative_tol;
    if (c.slack != 0.0) p["slack"] = c.slack;
    if (c.x_star != 0.0) p["x_star"] = c.x_star;
    if (!c.extremum.empty()) p["extremum"] = c.extremum;
    if (!c.direction.empty()) p["direction"] = c.direction;
    if (c.samples != 1) p["samples"] = c.samples;
    if (c.seed != 0) p["seed"] = c.seed;
    if (!c.inputs.empty()) {
        json inputs = json::array();
        for (const SampledInput& in : c.inputs) {
            json e;
            e["node"] = in.node;
            if (!in.values.empty()) {
                e["values"] = in.values;
            } else {
                e["lo"] = in.lo;
                e["hi"] = in.hi;
            }
            inputs.push_back(std::move(e));
        }
        p["inputs"] = inputs;
    }
    if (!c.fixed.empty()) p["fixed"] = number_map_to_json(c.fixed);
    if (!c.output.empty()) p["output"] = c.output;
    if (!c.vary.empty()) p["vary"] = c.vary;
    if (!c.surrogate.coefficients.empty() || c.surrogate.offset != 0.0) {
        json s;
        s["coefficients"] = number_map_to_json(c.surrogate.coefficients);
        s["offset"] = c.surrogate.offset;
        p["surrogate"] = s;
    }
    if (!c.surrogate_family.empty()) p["surrogate_family"] = c.surrogate_family;
    if (c.baseline_survival != 0.0) p["baseline_survival"] = c.baseline_survival;
    if (!c.note.empty()) p["note"] = c.note;
    j["params"] = p;
    return j;
}

std::map<std::string, double> number_map_from_json(const json& j, const std::string& path) {
    as_object(j, path);
    std::map<std::string, double> m;
    for (const auto& [k, v] : j.items()) m[k] = as_number(v, path + "/" + k);
    return m;
}

EvidenceCheck check_from_json(const json& top, std::string path) {
    as_object(top, path);
    reject_unknown(top, path, {"id", "kind", "mode", "target", "params"});
    EvidenceCheck c;
    c.id = as_string(field(top, path, "id"), path + "/id");
    std::string kind = as_string(field(top, path, "kind"), path + "/kind");
    auto k = check_kind_from_name(kind);
    if (!k) bad(path + "/kind", "unknown check kind '" + kind + "'");
    c.kind = *k;
    c.mode = mode_for_kind(*k);
    if (top.contains("mode")) {
        std::string mode = as_string(top["mode"], path + "/mode");
        if (mode != "analytical" && mode != "empirical")
            bad(path + "/mode", "unknown mode '" + mode + "'");
        if ((mode == "analytical") != (c.mode == CheckMode::analytical))
            bad(path + "/mode", "mode '" + mode + "' does not match kind '" + kind + "'");
    }
    const json& target = as_object(field(top, path, "target"), path + "/target");
    reject_unknown(target, path + "/target", {"edge", "node", "subgraph", "nodes"});
    if (target.contains("edge")) {
        std::string p = path + "/target/edge";
        const json& e = as_array(target["edge"], p);
        if (e.size() != 2) bad(p, "expected an [from, to] pair");
        c.target.edge = EdgeRef{as_string(e[0], p + "/0"), as_string(e[1], p + "/1")};
    }
    if (target.contains("node"))
        c.target.node = as_string(target["node"], path + "/target/node");
    if (target.contains("subgraph"))
        c.target.subgraph = subgraph_from_json(target["subgraph"], path + "/target/subgraph");
    if (target.contains("nodes")) {
        std::string p = path + "/target/nodes";
        const json& a = as_array(target["nodes"], p);
        for (std::size_t i = 0; i < a.size(); ++i)
            c.target.node_list.push_back(as_string(a[i], p + "/" + std::to_string(i)));
    }
    static const json empty_params = json::object();
    const json& j = top.contains("params") ? top["params"] : empty_params;
    path += "/params";
    as_object(j, path);
    reject_unknown(j, path,
                   {"expected", "expected_offset", "tolerance", "step", "derivative_tol",
                    "slack", "x_star", "extremum", "direction", "samples", "seed", "inputs",
                    "fixed", "output", "vary", "surrogate", "surrogate_family",
                    "baseline_survival", "note"});
    if (j.contains("expected")) {
        const json& e = j["expected"];
        if (e.is_number()) c.expected["value"] = e.get<double>();
        else c.expected = number_map_from_json(e, path + "/expected");
    }
    if (j.contains("expected_offset"))
        c.expected_offset = as_number(j["expected_offset"], path + "/expected_offset");
    if (j.contains("tolerance")) c.tolerance = as_number(j["tolerance"], path + "/tolerance");
    if (j.contains("step")) c.step = as_number(j["step"], path + "/step");
    if (j.contains("derivative_tol"))
        c.derivative_tol = as_number(j["derivative_tol"], path + "/derivative_tol");
    if (j.contains("slack")) c.slack = as_number(j["slack"], path + "/slack");
    if (j.contains("x_star")) c.x_star = as_number(j["x_star"], path + "/x_star");
    if (j.contains("extremum")) c.extremum = as_string(j["extremum"], path + "/extremum");
    if (j.contains("direction")) c.direction = as_string(j["direction"], path + "/direction");
    if (j.contains("samples"))
        c.samples = static_cast<int>(as_integer(j["samples"], path + "/samples"));
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            bad(path + "/seed", "expected an integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("inputs")) {
        std::string p = path + "/inputs";
        const json& a = as_array(j["inputs"], p);
        for (std::size_t i = 0; i < a.size(); ++i) {
            std::string ip = p + "/" + std::to_string(i);
            const json& e = as_object(a[i], ip);
            reject_unknown(e, ip, {"node", "lo", "hi", "values"});
            SampledInput in;
            in.node = as_string(field(e, ip, "node"), ip + "/node");
            if (e.contains("values")) {
                const json& vals = as_array(e["values"], ip + "/values");
                for (std::size_t v = 0; v < vals.size(); ++v)
                    in.values.push_back(
                        as_number(vals[v], ip + "/values/" + std::to_string(v)));
            } else {
                in.lo = as_number(field(e, ip, "lo"), ip + "/lo");
                in.hi = as_number(field(e, ip, "hi"), ip + "/hi");
            }
            c.inputs.push_back(std::move(in));
        }
    }
    if (j.contains("fixed")) {
        for (const auto& [key, v] : number_map_from_json(j["fixed"], path + "/fixed"))
            c.fixed[key] = v;
    }
    if (j.contains("output")) c.output = as_string(j["output"], path + "/output");
    if (j.contains("vary")) c.vary = as_string(j["vary"], path + "/vary");
    if (j.contains("surrogate")) {
        std::string p = path + "/surrogate";
        const json& s = as_object(j["surrogate"], p);
        reject_unknown(s, p, {"coefficients", "offset"});
        if (s.contains("coefficients"))
            c.surrogate.coefficients =
                number_map_from_json(s["coefficients"], p + "/coefficients");
        if (s.contains("offset")) c.surrogate.offset = as_number(s["offset"], p + "/offset");
    }
    if (j.contains("surrogate_family"))
        c.surrogate_family = as_string(j["surrogate_family"], path + "/surrogate_family");
    if (j.contains("baseline_survival"))
        c.baseline_survival = as_number(j["baseline_survival"], path + "/baseline_survival");
    if (j.contains("note")) c.note = as_string(j["note"], path + "/note");
    return c;
}

json checks_to_json(const std::vector<EvidenceCheck>& checks) {
    json a = json::array();
    for (const EvidenceCheck& c : checks) a.push_back(check_to_json(c));
    return a;
}

std::vector<EvidenceCheck> checks_from_json(const json& j, const std::string& path) {
    as_array(j, path);
    std::vector<EvidenceCheck> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(check_from_json(j[i], path + "/" + std::to_string(i)));
    return out;
}

std::string hex_digest(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
        throw RuntimeError("DigestFailure", "SHA-256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

ComputationalGraph parse_graph_json(const std::string& text) {
    json j = parse_text(text);
    as_object(j, "");
    reject_unknown(j, "", {"nodes", "edges"});
    ComputationalGraph::Builder b;
    const json& nodes = as_array(field(j, "", "nodes"), "/nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::string path = "/nodes/" + std::to_string(i);
        const json& n = as_object(nodes[i], path);
        reject_unknown(n, path, {"id", "kind", "op"});
        std::string id = as_string(field(n, path, "id"), path + "/id");
        std::string kind = as_string(field(n, path, "kind"), path + "/kind");
        auto k = node_kind_from_name(kind);
        if (!k) bad(path + "/kind", "unknown node kind '" + kind + "'");
        if (*k == NodeKind::input) {
            if (n.contains("op")) bad(path + "/op", "input nodes carry no operator");
            b.input(id);
        } else {
            OperatorSpec op = op_from_json(field(n, path, "op"), path + "/op");
            if (*k == NodeKind::compute) b.compute(id, op);
            else b.output(id, op);
        }
    }
    const json& edges = as_array(field(j, "", "edges"), "/edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        std::string path = "/edges/" + std::to_string(i);
        const json& e = as_object(edges[i], path);
        reject_unknown(e, path, {"from", "to", "weight"});
        double w = e.contains("weight") ? as_number(e["weight"], path + "/weight") : 1.0;
        b.edge(as_string(field(e, path, "from"), path + "/from"),
               as_string(field(e, path, "to"), path + "/to"), w);
    }
    try {
        return b.build();
    } catch (const Error& err) {
        throw ParseError("SemanticError", err.what());
    }
}

std::string graph_to_json(const ComputationalGraph& graph) {
    json j;
    json nodes = json::array();
    for (const Node& n : graph.nodes()) {
        json e;
        e["id"] = n.id;
        e["kind"] = node_kind_name(n.kind);
        if (n.kind != NodeKind::input) e["op"] = op_to_json(n.op);
        nodes.push_back(std::move(e));
    }
    j["nodes"] = nodes;
    json edges = json::array();
    for (const Edge& e : graph.edges()) {
        json x;
        x["from"] = e.from;
        x["to"] = e.to;
        x["weight"] = e.weight;
        edges.push_back(std::move(x));
    }
    j["edges"] = edges;
    return j.dump(2) + "\n";
}

AnnotationBundle parse_bundle_json(const std::string& text) {
    json j = parse_text(text);
    as_object(j, "");
    reject_unknown(j, "", {"context", "annotations", "root"});
    AnnotationBundle b;
    if (j.contains("context")) {
        const json& c = as_object(j["context"], "/context");
        reject_unknown(c, "/context", {"audience", "language", "purpose"});
        if (c.contains("audience"))
            b.context.audience = as_string(c["audience"], "/context/audience");
        if (c.contains("language"))
            b.context.language = as_string(c["language"], "/context/language");
        if (c.contains("purpose"))
            b.context.purpose = as_string(c["purpose"], "/context/purpose");
    }
    const json& anns = as_array(field(j, "", "annotations"), "/annotations");
    for (std::size_t i = 0; i < anns.size(); ++i) {
        std::string path = "/annotations/" + std::to_string(i);
        const json& a = as_object(anns[i], path);
        std::string kind = as_string(field(a, path, "kind"), path + "/kind");
        if (kind == "leaf") {
            reject_unknown(a, path, {"id", "kind", "subgraph", "hypothesis", "evidence"});
            LeafAnnotation leaf;
            leaf.id = as_string(field(a, path, "id"), path + "/id");
            leaf.subgraph = subgraph_from_json(field(a, path, "subgraph"), path + "/subgraph");
            leaf.hypothesis = as_string(field(a, path, "hypothesis"), path + "/hypothesis");
            leaf.evidence = checks_from_json(field(a, path, "evidence"), path + "/evidence");
            b.leaves.push_back(std::move(leaf));
        } else if (kind == "composition") {
            reject_unknown(a, path,
                           {"id", "kind", "subgraph", "hypothesis", "evidence", "children"});
            CompositionAnnotation comp;
            comp.id = as_string(field(a, path, "id"), path + "/id");
            comp.junction = subgraph_from_json(field(a, path, "subgraph"), path + "/subgraph");
            comp.hypothesis = as_string(field(a, path, "hypothesis"), path + "/hypothesis");
            comp.evidence = checks_from_json(field(a, path, "evidence"), path + "/evidence");
            const json& children = as_array(field(a, path, "children"), path + "/children");
            for (std::size_t k = 0; k < children.size(); ++k)
                comp.children.push_back(
                    as_string(children[k], path + "/children/" + std::to_string(k)));
            b.compositions.push_back(std::move(comp));
        } else {
            bad(path + "/kind", "unknown annotation kind '" + kind + "'");
        }
    }
    b.root = as_string(field(j, "", "root"), "/root");
    return b;
}

std::string bundle_to_json(const AnnotationBundle& bundle) {
    json j;
    json ctx;
    ctx["audience"] = bundle.context.audience;
    ctx["language"] = bundle.context.language;
    ctx["purpose"] = bundle.context.purpose;
    j["context"] = ctx;
    json anns = json::array();
    for (const LeafAnnotation& a : bundle.leaves) {
        json e;
        e["id"] = a.id;
        e["kind"] = "leaf";
        e["subgraph"] = subgraph_to_json(a.subgraph);
        e["hypothesis"] = a.hypothesis;
        e["evidence"] = checks_to_json(a.evidence);
        anns.push_back(std::move(e));
    }
    for (const CompositionAnnotation& a : bundle.compositions) {
        json e;
        e["id"] = a.id;
        e["kind"] = "composition";
        e["subgraph"] = subgraph_to_json(a.junction);
        e["hypothesis"] = a.hypothesis;
        e["evidence"] = checks_to_json(a.evidence);
        e["children"] = a.children;
        anns.push_back(std::move(e));
    }
    j["annotations"] = anns;
    j["root"] = bundle.root;
    return j.dump(2) + "\n";
}

PatientFile parse_patient_json(const std::string& text) {
    json j = parse_text(text);
    as_object(j, "");
    reject_unknown(j, "",
                   {"sex", "age", "ethnicity", "nzdep", "smoking", "famhx", "af", "diabetes",
                    "bpmed", "lipmed", "atmed", "sbp", "tchdl"});
    PatientFile f;
    std::string sex = as_string(field(j, "", "sex"), "/sex");
    auto s = sex_from_name(sex);
    if (!s) bad("/sex", "unknown sex '" + sex + "'");
    f.sex = *s;
    f.patient.age = as_number(field(j, "", "age"), "/age");
    std::string eth = as_string(field(j, "", "ethnicity"), "/ethnicity");
    static const std::map<std::string, Ethnicity> eth_table = {
        {"european", Ethnicity::european}, {"maori", Ethnicity::maori},
        {"pacific", Ethnicity::pacific},   {"indian", Ethnicity::indian},
        {"asian", Ethnicity::asian},
    };
    auto ei = eth_table.find(eth);
    if (ei == eth_table.end()) bad("/ethnicity", "unknown ethnicity '" + eth + "'");
    f.patient.ethnicity = ei->second;
    f.patient.nzdep = static_cast<int>(as_integer(field(j, "", "nzdep"), "/nzdep"));
    std::string smk = as_string(field(j, "", "smoking"), "/smoking");
    static const std::map<std::string, Smoking> smk_table = {
        {"never", Smoking::never}, {"ex", Smoking::ex}, {"current", Smoking::current}};
    auto si = smk_table.find(smk);
    if (si == smk_table.end()) bad("/smoking", "unknown smoking status '" + smk + "'");
    f.patient.smoking = si->second;
    f.patient.famhx = as_bool(field(j, "", "famhx"), "/famhx");
    f.patient.af = as_bool(field(j, "", "af"), "/af");
    f.patient.diabetes = as_bool(field(j, "", "diabetes"), "/diabetes");
    f.patient.bpmed = as_bool(field(j, "", "bpmed"), "/bpmed");
    f.patient.lipmed = as_bool(field(j, "", "lipmed"), "/lipmed");
    f.patient.atmed = as_bool(field(j, "", "atmed"), "/atmed");
    f.patient.sbp = as_number(field(j, "", "sbp"), "/sbp");
    f.patient.tchdl = as_number(field(j, "", "tchdl"), "/tchdl");
    return f;
}

std::string patient_to_json(const PatientFile& p) {
    static const char* eth_names[] = {"european", "maori", "pacific", "indian", "asian"};
    static const char* smk_names[] = {"never", "ex", "current"};
    json j;
    j["sex"] = sex_name(p.sex);
    j["age"] = p.patient.age;
    j["ethnicity"] = eth_names[static_cast<int>(p.patient.ethnicity)];
    j["nzdep"] = p.patient.nzdep;
    j["smoking"] = smk_names[static_cast<int>(p.patient.smoking)];
    j["famhx"] = p.patient.famhx;
    j["af"] = p.patient.af;
    j["diabetes"] = p.patient.diabetes;
    j["bpmed"] = p.patient.bpmed;
    j["lipmed"] = p.patient.lipmed;
    j["atmed"] = p.patient.atmed;
    j["sbp"] = p.patient.sbp;
    j["tchdl"] = p.patient.tchdl;
    return j.dump(2) + "\n";
}

TreeSpec parse_tree_spec_json(const std::string& text) {
    json j = parse_text(text);
    as_object(j, "");
    reject_unknown(j, "", {"num_inputs", "root", "nodes"});
    TreeSpec spec;
    spec.num_inputs = static_cast<int>(as_integer(field(j, "", "num_inputs"), "/num_inputs"));
    if (j.contains("root")) spec.root = static_cast<int>(as_integer(j["root"], "/root"));
    const json& nodes = as_array(field(j, "", "nodes"), "/nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::string path = "/nodes/" + std::to_string(i);
        const json& n = as_object(nodes[i], path);
        TreeSpec::Node node;
        if (n.contains("value")) {
            reject_unknown(n, path, {"value"});
            node.value = as_number(n["value"], path + "/value");
        } else {
            reject_unknown(n, path, {"var", "cutoff", "left", "right"});
            node.var = static_cast<int>(as_integer(field(n, path, "var"), path + "/var"));
            if (node.var < 0) bad(path + "/var", "predicate variable must be non-negative");
            node.cutoff = as_number(field(n, path, "cutoff"), path + "/cutoff");
            node.left = static_cast<int>(as_integer(field(n, path, "left"), path + "/left"));
            node.right = static_cast<int>(as_integer(field(n, path, "right"), path + "/right"));
        }
        spec.nodes.push_back(node);
    }
    try {
        spec.validate();
    } catch (const Error& err) {
        throw ParseError("SemanticError", err.what());
    }
    return spec;
}

std::string graph_digest(const ComputationalGraph& graph) {
    return "sha256:" + hex_digest(graph_to_json(graph));
}

Report make_report(const ComputationalGraph& graph, const AnnotationBundle& bundle,
                   int arity_threshold) {
    validate_bundle(graph, bundle);
    Report r;
    r.graph_digest = graph_digest(graph);
    r.metrics = graph_metrics(graph);
    auto results = verify_bundle(graph, bundle);
    r.coverage = explainedness(graph, bundle, results);
    for (const auto& [_, result] : results) r.checks.push_back(result);
    auto note_of = [&](const std::vector<EvidenceCheck>& checks) {
        for (const EvidenceCheck& c : checks)
            if (!c.note.empty()) r.notes[c.id] = c.note;
    };
    for (const LeafAnnotation& a : bundle.leaves) note_of(a.evidence);
    for (const CompositionAnnotation& a : bundle.compositions) note_of(a.evidence);
    r.well_formed = check_well_formed(graph, bundle, results);
    r.verdict = explainability_criterion(graph, bundle, results);
    r.warnings = collect_warnings(bundle, arity_threshold);
    return r;
}

std::string report_to_json(const Report& r) {
    json j;
    json tool;
    tool["name"] = kToolName;
    tool["version"] = kToolVersion;
    j["tool"] = tool;
    json g;
    g["digest"] = r.graph_digest;
    g["nodes"] = r.metrics.num_nodes;
    g["edges"] = r.metrics.num_edges;
    j["graph"] = g;
    json cov;
    cov["structural"] = r.coverage.structural;
    cov["compositional"] = r.coverage.compositional;
    cov["uncovered_nodes"] = r.coverage.uncovered_nodes;
    cov["unverified_compositions"] = r.coverage.unverified_compositions;
    j["coverage"] = cov;
    json checks = json::array();
    for (const VerificationResult& c : r.checks) {
        json e;
        e["id"] = c.check_id;
        e["status"] = check_status_name(c.status);
        e["measured"] = number_map_to_json(c.measured);
        e["expected"] = number_map_to_json(c.expected);
        if (!c.diagnostics.empty()) e["diagnostics"] = c.diagnostics;
        if (auto it = r.notes.find(c.check_id); it != r.notes.end()) e["note"] = it->second;
        checks.push_back(std::move(e));
    }
    j["checks"] = checks;
    json wf;
    wf["leaves_valid"] = r.well_formed.requirements[0];
    wf["structural_coverage"] = r.well_formed.requirements[1];
    wf["compositional_coverage"] = r.well_formed.requirements[2];
    wf["root_spans_model"] = r.well_formed.requirements[3];
    json failures = json::array();
    for (const auto& [what, detail] : r.well_formed.failures)
        failures.push_back({{"requirement", what}, {"detail", detail}});
    wf["failures"] = failures;
    j["well_formed"] = wf;
    json v;
    v["well_formed"] = r.verdict.well_formed;
    v["all_evidence_verified"] = r.verdict.all_evidence_verified;
    v["explainable"] = r.verdict.explainable;
    j["verdict"] = v;
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

std::string report_to_markdown(const Report& r) {
    std::ostringstream out;
    out << "# verification report\n\n";
    out << "tool: " << kToolName << " " << kToolVersion << "\n\n";
    out << "graph: " << r.graph_digest << " (" << r.metrics.num_nodes << " nodes, "
        << r.metrics.num_edges << " edges)\n\n";
    out << "structural coverage: " << fmt(r.coverage.structural) << "\n";
    out << "compositional coverage: " << fmt(r.coverage.compositional) << "\n\n";
    out << "## checks\n\n";
    out << "| check | status | detail |\n";
    out << "|---|---|---|\n";
    for (const VerificationResult& c : r.checks) {
        std::string detail;
        for (const auto& [k, v] : c.measured) {
            if (!detail.empty()) detail += ", ";
            detail += k + "=" + fmt_g(v);
        }
        if (!c.diagnostics.empty()) detail += (detail.empty() ? "" : "; ") + c.diagnostics;
        if (auto it = r.notes.find(c.check_id); it != r.notes.end())
            detail += (detail.empty() ? "" : "; ") + it->second;
        out << "| " << c.check_id << " | " << check_status_name(c.status) << " | " << detail
            << " |\n";
    }
    out << "\n";
    if (!r.well_formed.failures.empty()) {
        out << "## unmet requirements\n\n";
        for (const auto& [what, detail] : r.well_formed.failures)
            out << "- " << what << ": " << detail << "\n";
        out << "\n";
    }
    if (!r.warnings.empty()) {
        out << "## warnings\n\n";
        for (const std::string& w : r.warnings) out << "- " << w << "\n";
        out << "\n";
    }
    out << "verdict: " << (r.verdict.explainable ? "EXPLAINABLE" : "NOT EXPLAINABLE") << "\n";
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("FileNotFound", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeError("FileWriteError", "cannot write '" + path + "'");
    out << content;
}

}  // namespace annotex
