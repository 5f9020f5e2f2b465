#include "annotex/predict.hpp"

#include <cmath>

namespace annotex {

namespace {

// Coefficients published only as hazard ratios appear here as ln(HR) rounded
// to 4 decimals.
const SexProfile kWomen = {
    Sex::women,
    56.1,    // mean_age
    129.0,   // mean_sbp
    3.7,     // mean_tchdl
    0.9832,  // baseline_survival_5y
    0.0756,  // age
    0.3920, 0.1989, 0.1222, -0.2877,  // eth maori/pacific/indian/asian
    0.108,                            // nzdep
    0.0862, 0.6206,                   // smk ex/current
    0.045,                            // famhx
    0.893,                            // af
    0.544,                            // dm
    0.0137,                           // sbp
    0.122,                            // tchdl
    0.340, -0.059, 0.117,             // bpmed/lipmed/atmed
    -0.0223,                          // age_dm
    -0.00044,                         // age_sbp
    -0.0043,                          // bpmed_sbp
};

const SexProfile kMen = {
    Sex::men,
    51.8,
    129.0,
    4.4,
    0.9748,
    0.0676,
    0.2927, 0.1740, 0.2927, -0.4005,
    0.079,
    0.0770, 0.5068,
    0.133,
    0.588,
    0.560,
    0.0164,
    0.131,
    0.295, -0.054, 0.093,
    -0.0202,
    -0.00042,
    -0.0053,
};

double published_hr(Sex s, const char* term) {
    static const std::map<std::string, std::pair<double, double>> table = {
        // women, men
        {"maori", {1.48, 1.34}},   {"pacific", {1.22, 1.19}}, {"indian", {1.13, 1.34}},
        {"asian", {0.75, 0.67}},   {"smk_ex", {1.09, 1.08}},  {"smk_current", {1.86, 1.66}},
        {"dm", {1.72, 1.75}},
    };
    const auto& p = table.at(term);
    return s == Sex::women ? p.first : p.second;
}

// All-risk-factors-at-reference input point; the linear predictor is 0 here.
ActivationMap baseline_inputs(const SexProfile& p) {
    return {
        {"age", p.mean_age}, {"eth", 0.0},   {"nzdep", 3.0},       {"smk", 0.0},
        {"famhx", 0.0},      {"af", 0.0},    {"dm", 0.0},          {"sbp", p.mean_sbp},
        {"tchdl", p.mean_tchdl}, {"bpmed", 0.0}, {"lipmed", 0.0},  {"atmed", 0.0},
    };
}

EvidenceCheck coef_check(const std::string& id, const NodeId& from, const NodeId& to,
                         double expected) {
    EvidenceCheck c;
    c.id = id;
    c.kind = CheckKind::coefficient_equals;
    c.mode = CheckMode::analytical;
    c.target.edge = EdgeRef{from, to};
    c.expected["value"] = expected;
    return c;
}

EvidenceCheck hr_check(const std::string& id, const NodeId& from, double expected) {
    EvidenceCheck c;
    c.id = id;
    c.kind = CheckKind::hazard_ratio_equals;
    c.mode = CheckMode::analytical;
    c.target.edge = EdgeRef{from, "eta"};
    c.expected["value"] = expected;
    return c;
}

EvidenceCheck additivity_check(const std::string& id, const SexProfile& p,
                               const std::vector<SampledInput>& varied, std::uint64_t seed) {
    EvidenceCheck c;
    c.id = id;
    c.kind = CheckKind::additivity;
    c.mode = CheckMode::empirical;
    c.output = "eta";
    c.fixed = baseline_inputs(p);
    c.inputs = varied;
    c.samples = 40;
    c.seed = seed;
    return c;
}

Subgraph single_node_subgraph(const NodeId& id) {
    Subgraph s;
    s.entry = {id};
    s.exit = {id};
    s.nodes = {id};
    return s;
}

}  // namespace

const char* sex_name(Sex s) { return s == Sex::women ? "women" : "men"; }

std::optional<Sex> sex_from_name(const std::string& name) {
    if (name == "women" || name == "female" || name == "f") return Sex::women;
    if (name == "men" || name == "male" || name == "m") return Sex::men;
    return std::nullopt;
}

const SexProfile& sex_profile(Sex s) { return s == Sex::women ? kWomen : kMen; }

std::vector<std::string> validate_patient(const PatientInput& p) {
    if (p.sbp <= 0.0)
        throw RuntimeError("InvalidPatient", "systolic blood pressure must be positive");
    if (p.tchdl <= 0.0)
        throw RuntimeError("InvalidPatient", "total:HDL cholesterol ratio must be positive");
    if (p.nzdep < 1 || p.nzdep > 5)
        throw RuntimeError("InvalidPatient", "deprivation quintile must be in 1..5");
    std::vector<std::string> warnings;
    if (p.age < 30.0 || p.age > 74.0)
        warnings.push_back("age " + std::to_string(p.age) +
                           " is outside the 30-74 derivation cohort");
    return warnings;
}

ActivationMap patient_to_inputs(const PatientInput& p) {
    return {
        {"age", p.age},
        {"eth", static_cast<double>(p.ethnicity)},
        {"nzdep", static_cast<double>(p.nzdep)},
        {"smk", static_cast<double>(p.smoking)},
        {"famhx", p.famhx ? 1.0 : 0.0},
        {"af", p.af ? 1.0 : 0.0},
        {"dm", p.diabetes ? 1.0 : 0.0},
        {"sbp", p.sbp},
        {"tchdl", p.tchdl},
        {"bpmed", p.bpmed ? 1.0 : 0.0},
        {"lipmed", p.lipmed ? 1.0 : 0.0},
        {"atmed", p.atmed ? 1.0 : 0.0},
    };
}

AnnotatedModel build_predict(Sex sex) {
    const SexProfile& p = sex_profile(sex);

    ComputationalGraph::Builder b;
    for (const char* id : {"age", "eth", "nzdep", "smk", "famhx", "af", "dm", "sbp", "tchdl",
                           "bpmed", "lipmed", "atmed"})
        b.input(id);

    b.compute("age_c", OperatorSpec::center(p.mean_age));
    b.compute("nzdep_c", OperatorSpec::center(3.0));
    b.compute("sbp_c", OperatorSpec::center(p.mean_sbp));
    b.compute("tchdl_c", OperatorSpec::center(p.mean_tchdl));
    b.compute("eth_maori", OperatorSpec::indicator(1.0));
    b.compute("eth_pacific", OperatorSpec::indicator(2.0));
    b.compute("eth_indian", OperatorSpec::indicator(3.0));
    b.compute("eth_asian", OperatorSpec::indicator(4.0));
    b.compute("smk_ex", OperatorSpec::indicator(1.0));
    b.compute("smk_current", OperatorSpec::indicator(2.0));
    b.compute("ix_age_dm", OperatorSpec::product());
    b.compute("ix_age_sbp", OperatorSpec::product());
    b.compute("ix_bpmed_sbp", OperatorSpec::product());
    b.compute("eta", OperatorSpec::weighted_sum());
    b.compute("exp_eta", OperatorSpec::exponential());
    b.compute("surv", OperatorSpec::power_base(p.baseline_survival_5y));
    b.output("risk", OperatorSpec::one_minus());

    b.edge("age", "age_c");
    b.edge("nzdep", "nzdep_c");
    b.edge("sbp", "sbp_c");
    b.edge("tchdl", "tchdl_c");
    b.edge("eth", "eth_maori");
    b.edge("eth", "eth_pacific");
    b.edge("eth", "eth_indian");
    b.edge("eth", "eth_asian");
    b.edge("smk", "smk_ex");
    b.edge("smk", "smk_current");
    b.edge("age_c", "ix_age_dm");
    b.edge("dm", "ix_age_dm");
    b.edge("age_c", "ix_age_sbp");
    b.edge("sbp_c", "ix_age_sbp");
    b.edge("bpmed", "ix_bpmed_sbp");
    b.edge("sbp_c", "ix_bpmed_sbp");

    b.edge("age_c", "eta", p.age);
    b.edge("eth_maori", "eta", p.eth_maori);
    b.edge("eth_pacific", "eta", p.eth_pacific);
    b.edge("eth_indian", "eta", p.eth_indian);
    b.edge("eth_asian", "eta", p.eth_asian);
    b.edge("nzdep_c", "eta", p.nzdep);
    b.edge("smk_ex", "eta", p.smk_ex);
    b.edge("smk_current", "eta", p.smk_current);
    b.edge("famhx", "eta", p.famhx);
    b.edge("af", "eta", p.af);
    b.edge("dm", "eta", p.dm);
    b.edge("sbp_c", "eta", p.sbp);
    b.edge("tchdl_c", "eta", p.tchdl);
    b.edge("bpmed", "eta", p.bpmed);
    b.edge("lipmed", "eta", p.lipmed);
    b.edge("atmed", "eta", p.atmed);
    b.edge("ix_age_dm", "eta", p.age_dm);
    b.edge("ix_age_sbp", "eta", p.age_sbp);
    b.edge("ix_bpmed_sbp", "eta", p.bpmed_sbp);

    b.edge("eta", "exp_eta");
    b.edge("exp_eta", "surv");
    b.edge("surv", "risk");

    AnnotatedModel m{b.build(), {}};
    m.bundle.context = {"clinicians and health researchers assessing cardiovascular risk models",
                        "English", "regulatory and clinical transparency review"};

    // A1: age. Carries the interaction gates as exits so the centered value's
    // fan-out stays inside the annotation.
    {
        LeafAnnotation a;
        a.id = "A1";
        a.subgraph.entry = {"age"};
        a.subgraph.exit = {"eta", "ix_age_dm", "ix_age_sbp"};
        a.subgraph.nodes = {"age", "age_c", "eta", "ix_age_dm", "ix_age_sbp"};
        a.subgraph.edges = {{"age", "age_c"},
                            {"age_c", "eta"},
                            {"age_c", "ix_age_dm"},
                            {"age_c", "ix_age_sbp"}};
        a.hypothesis = "Each year of age above the cohort mean multiplies the hazard by exp(" +
                       std::to_string(p.age) + "); age also modulates the diabetes and blood "
                       "pressure effects through the interaction terms.";
        a.evidence.push_back(coef_check("A1.coef", "age_c", "eta", p.age));
        EvidenceCheck centering;
        centering.id = "A1.centering";
        centering.kind = CheckKind::closed_form_affine;
        centering.mode = CheckMode::analytical;
        Subgraph cs;
        cs.entry = {"age"};
        cs.exit = {"age_c"};
        cs.nodes = {"age", "age_c"};
        cs.edges = {{"age", "age_c"}};
        centering.target.subgraph = cs;
        centering.expected["age"] = 1.0;
        centering.expected_offset = -p.mean_age;
        a.evidence.push_back(std::move(centering));
        m.bundle.leaves.push_back(std::move(a));
    }

    // A2: ethnicity, European as the reference category.
    {
        LeafAnnotation a;
        a.id = "A2";
        a.subgraph.entry = {"eth"};
        a.subgraph.exit = {"eta"};
        a.subgraph.nodes = {"eth", "eth_maori", "eth_pacific", "eth_indian", "eth_asian", "eta"};
        a.subgraph.edges = {{"eth", "eth_maori"},    {"eth", "eth_pacific"},
                            {"eth", "eth_indian"},   {"eth", "eth_asian"},
                            {"eth_maori", "eta"},    {"eth_pacific", "eta"},
                            {"eth_indian", "eta"},   {"eth_asian", "eta"}};
        a.hypothesis = "Ethnicity shifts the hazard relative to the European reference group by "
                       "a fixed ratio per group.";
        a.evidence.push_back(hr_check("A2.hr_maori", "eth_maori", published_hr(sex, "maori")));
        a.evidence.push_back(
            hr_check("A2.hr_pacific", "eth_pacific", published_hr(sex, "pacific")));
        a.evidence.push_back(hr_check("A2.hr_indian", "eth_indian", published_hr(sex, "indian")));
        a.evidence.push_back(hr_check("A2.hr_asian", "eth_asian", published_hr(sex, "asian")));
        m.bundle.leaves.push_back(std::move(a));
    }

    // A3: socioeconomic deprivation, centered on quintile 3.
    {
        LeafAnnotation a;
        a.id = "A3";
        a.subgraph.entry = {"nzdep"};
        a.subgraph.exit = {"eta"};
        a.subgraph.nodes = {"nzdep", "nzdep_c", "eta"};
        a.subgraph.edges = {{"nzdep", "nzdep_c"}, {"nzdep_c", "eta"}};
        a.hypothesis = "Each deprivation quintile above the median adds " + std::to_string(p.nzdep) +
                       " to the linear predictor.";
        a.evidence.push_back(coef_check("A3.coef", "nzdep_c", "eta", p.nzdep));
        m.bundle.leaves.push_back(std::move(a));
    }

    // A4: smoking status, never-smoker reference.
    {
        LeafAnnotation a;
        a.id = "A4";
        a.subgraph.entry = {"smk"};
        a.subgraph.exit = {"eta"};
        a.subgraph.nodes = {"smk", "smk_ex", "smk_current", "eta"};
        a.subgraph.edges = {{"smk", "smk_ex"},
                            {"smk", "smk_current"},
                            {"smk_ex", "eta"},
                            {"smk_current", "eta"}};
        a.hypothesis = "Current smoking carries a substantially higher hazard than ex-smoking, "
                       "both relative to never smoking.";
        a.evidence.push_back(hr_check("A4.hr_ex", "smk_ex", published_hr(sex, "smk_ex")));
        a.evidence.push_back(
            hr_check("A4.hr_current", "smk_current", published_hr(sex, "smk_current")));
        m.bundle.leaves.push_back(std::move(a));
    }

    // A5: systolic blood pressure, with its two interaction gates as exits.
    {
        LeafAnnotation a;
        a.id = "A5";
        a.subgraph.entry = {"sbp"};
        a.subgraph.exit = {"eta", "ix_age_sbp", "ix_bpmed_sbp"};
        a.subgraph.nodes = {"sbp", "sbp_c", "eta", "ix_age_sbp", "ix_bpmed_sbp"};
        a.subgraph.edges = {{"sbp", "sbp_c"},
                            {"sbp_c", "eta"},
                            {"sbp_c", "ix_age_sbp"},
                            {"sbp_c", "ix_bpmed_sbp"},
                            {"ix_age_sbp", "eta"}};
        a.hypothesis = "Each mmHg of systolic pressure above " + std::to_string(p.mean_sbp) +
                       " adds " + std::to_string(p.sbp) + " to the linear predictor for an "
                       "untreated person of mean age.";
        a.evidence.push_back(coef_check("A5.coef", "sbp_c", "eta", p.sbp));
        EvidenceCheck slope;
        slope.id = "A5.slope_untreated";
        slope.kind = CheckKind::perturbation_slope;
        slope.mode = CheckMode::empirical;
        slope.output = "eta";
        slope.vary = "sbp";
        slope.fixed = baseline_inputs(p);
        slope.expected["value"] = p.sbp;
        slope.samples = 1;
        a.evidence.push_back(std::move(slope));
        m.bundle.leaves.push_back(std::move(a));
    }

    // A6: total:HDL cholesterol ratio.
    {
        LeafAnnotation a;
        a.id = "A6";
        a.subgraph.entry = {"tchdl"};
        a.subgraph.exit = {"eta"};
        a.subgraph.nodes = {"tchdl", "tchdl_c", "eta"};
        a.subgraph.edges = {{"tchdl", "tchdl_c"}, {"tchdl_c", "eta"}};
        a.hypothesis = "Risk rises monotonically with the total:HDL cholesterol ratio, by " +
                       std::to_string(p.tchdl) + " per unit.";
        a.evidence.push_back(coef_check("A6.coef", "tchdl_c", "eta", p.tchdl));
        EvidenceCheck mono;
        mono.id = "A6.monotone";
        mono.kind = CheckKind::monotonic_on;
        mono.mode = CheckMode::empirical;
        mono.target.subgraph = Subgraph{{"tchdl"},
                                        {"eta"},
                                        {"tchdl", "tchdl_c", "eta"},
                                        {{"tchdl", "tchdl_c"}, {"tchdl_c", "eta"}}};
        mono.direction = "increasing";
        mono.inputs.push_back({"tchdl", 1.0, 12.0, {}});
        mono.samples = 25;
        a.evidence.push_back(std::move(mono));
        m.bundle.leaves.push_back(std::move(a));
    }

    // A7: diabetes, whose effect attenuates with age.
    {
        LeafAnnotation a;
        a.id = "A7";
        a.subgraph.entry = {"dm"};
        a.subgraph.exit = {"eta", "ix_age_dm"};
        a.subgraph.nodes = {"dm", "eta", "ix_age_dm"};
        a.subgraph.edges = {{"dm", "eta"}, {"dm", "ix_age_dm"}, {"ix_age_dm", "eta"}};
        a.hypothesis = "Diabetes multiplies the hazard by about " +
                       std::to_string(published_hr(sex, "dm")) +
                       " at the mean age, with a smaller effect at older ages.";
        a.evidence.push_back(hr_check("A7.hr_mean", "dm", published_hr(sex, "dm")));
        for (double age : {40.0, 70.0}) {
            EvidenceCheck abl;
            abl.id = "A7.effect_age" + std::to_string(static_cast<int>(age));
            abl.kind = CheckKind::ablation_delta;
            abl.mode = CheckMode::empirical;
            abl.target.subgraph = single_node_subgraph("dm");
            abl.output = "eta";
            abl.fixed = baseline_inputs(p);
            abl.fixed["age"] = age;
            abl.fixed["dm"] = 1.0;
            abl.expected["value"] = p.dm + p.age_dm * (age - p.mean_age);
            abl.tolerance = 1e-6;
            abl.note = "Expected value is derived from the model coefficients at this age; "
                       "rounded tabulations of the same quantity may differ.";
            abl.samples = 1;
            a.evidence.push_back(std::move(abl));
        }
        m.bundle.leaves.push_back(std::move(a));
    }

    // A8: atrial fibrillation.
    {
        LeafAnnotation a;
        a.id = "A8";
        a.subgraph.entry = {"af"};
        a.subgraph.exit = {"eta"};
        a.subgraph.nodes = {"af", "eta"};
        a.subgraph.edges = {{"af", "eta"}};
        a.hypothesis = "A history of atrial fibrillation adds " + std::to_string(p.af) +
                       " to the linear predictor.";
        a.evidence.push_back(coef_check("A8.coef", "af", "eta", p.af));
        EvidenceCheck abl;
        abl.id = "A8.ablation";
        abl.kind = CheckKind::ablation_delta;
        abl.mode = CheckMode::empirical;
        abl.target.subgraph = single_node_subgraph("af");
        abl.output = "eta";
        abl.fixed = baseline_inputs(p);
        abl.fixed["af"] = 1.0;
        abl.expected["value"] = p.af;
        abl.tolerance = 1e-6;
        abl.samples = 1;
        a.evidence.push_back(std::move(abl));
        m.bundle.leaves.push_back(std::move(a));
    }

    // A9: family history of premature cardiovascular disease.
    {
        LeafAnnotation a;
        a.id = "A9";
        a.subgraph.entry = {"famhx"};
        a.subgraph.exit = {"eta"};
        a.subgraph.nodes = {"famhx", "eta"};
        a.subgraph.edges = {{"famhx", "eta"}};
        a.hypothesis = "Family history of premature cardiovascular disease adds " +
                       std::to_string(p.famhx) + " to the linear predictor.";
        a.evidence.push_back(coef_check("A9.coef", "famhx", "eta", p.famhx));
        m.bundle.leaves.push_back(std::move(a));
    }

    // A10: blood pressure lowering treatment, which also damps the SBP slope.
    {
        LeafAnnotation a;
        a.id = "A10";
        a.subgraph.entry = {"bpmed"};
        a.subgraph.exit = {"eta", "ix_bpmed_sbp"};
        a.subgraph.nodes = {"bpmed", "eta", "ix_bpmed_sbp"};
        a.subgraph.edges = {{"bpmed", "eta"}, {"bpmed", "ix_bpmed_sbp"}, {"ix_bpmed_sbp", "eta"}};
        a.hypothesis = "Being on blood pressure lowering treatment marks higher baseline risk "
                       "and flattens the per-mmHg pressure slope.";
        a.evidence.push_back(coef_check("A10.coef", "bpmed", "eta", p.bpmed));
        EvidenceCheck slope;
        slope.id = "A10.slope_treated";
        slope.kind = CheckKind::perturbation_slope;
        slope.mode = CheckMode::empirical;
        slope.output = "eta";
        slope.vary = "sbp";
        slope.fixed = baseline_inputs(p);
        slope.fixed["bpmed"] = 1.0;
        slope.expected["value"] = p.sbp + p.bpmed_sbp;
        slope.samples = 1;
        a.evidence.push_back(std::move(slope));
        m.bundle.leaves.push_back(std::move(a));
    }

    // A11: lipid lowering treatment.
    {
        LeafAnnotation a;
        a.id = "A11";
        a.subgraph.entry = {"lipmed"};
        a.subgraph.exit = {"eta"};
        a.subgraph.nodes = {"lipmed", "eta"};
        a.subgraph.edges = {{"lipmed", "eta"}};
        a.hypothesis = "Lipid lowering treatment contributes " + std::to_string(p.lipmed) +
                       " to the linear predictor.";
        a.evidence.push_back(coef_check("A11.coef", "lipmed", "eta", p.lipmed));
        m.bundle.leaves.push_back(std::move(a));
    }

    // A12: antithrombotic treatment.
    {
        LeafAnnotation a;
        a.id = "A12";
        a.subgraph.entry = {"atmed"};
        a.subgraph.exit = {"eta"};
        a.subgraph.nodes = {"atmed", "eta"};
        a.subgraph.edges = {{"atmed", "eta"}};
        a.hypothesis = "Antithrombotic treatment contributes " + std::to_string(p.atmed) +
                       " to the linear predictor.";
        a.evidence.push_back(coef_check("A12.coef", "atmed", "eta", p.atmed));
        m.bundle.leaves.push_back(std::move(a));
    }

    // Risk factor clusters. Each junction is the shared accumulator node; the
    // additivity evidence varies only that cluster's inputs around the
    // all-reference baseline, where the interaction gates are zero.
    Subgraph eta_junction = single_node_subgraph("eta");

    {
        CompositionAnnotation c;
        c.id = "C1";
        c.junction = eta_junction;
        c.hypothesis = "Demographic and social factors (age, ethnicity, deprivation, family "
                       "history) combine additively in the linear predictor.";
        c.evidence.push_back(additivity_check("C1.additive", p,
                                              {{"age", 30.0, 74.0, {}},
                                               {"eth", 0, 0, {0, 1, 2, 3, 4}},
                                               {"nzdep", 0, 0, {1, 2, 3, 4, 5}},
                                               {"famhx", 0, 0, {0, 1}}},
                                              11));
        c.children = {"A1", "A2", "A3", "A9"};
        m.bundle.compositions.push_back(std::move(c));
    }
    {
        CompositionAnnotation c;
        c.id = "C2";
        c.junction = eta_junction;
        c.hypothesis = "Blood pressure and cholesterol combine additively at mean age for an "
                       "untreated person.";
        c.evidence.push_back(additivity_check(
            "C2.additive", p, {{"sbp", 90.0, 200.0, {}}, {"tchdl", 1.0, 12.0, {}}}, 12));
        c.children = {"A5", "A6"};
        m.bundle.compositions.push_back(std::move(c));
    }
    {
        CompositionAnnotation c;
        c.id = "C3";
        c.junction = eta_junction;
        c.hypothesis = "Clinical history factors (smoking, diabetes, atrial fibrillation) "
                       "combine additively at mean age.";
        c.evidence.push_back(additivity_check(
            "C3.additive", p,
            {{"smk", 0, 0, {0, 1, 2}}, {"dm", 0, 0, {0, 1}}, {"af", 0, 0, {0, 1}}}, 13));
        c.children = {"A4", "A7", "A8"};
        m.bundle.compositions.push_back(std::move(c));
    }
    {
        CompositionAnnotation c;
        c.id = "C4";
        c.junction = eta_junction;
        c.hypothesis = "Treatment indicators combine additively at mean blood pressure.";
        c.evidence.push_back(additivity_check("C4.additive", p,
                                              {{"bpmed", 0, 0, {0, 1}},
                                               {"lipmed", 0, 0, {0, 1}},
                                               {"atmed", 0, 0, {0, 1}}},
                                              14));
        c.children = {"A10", "A11", "A12"};
        m.bundle.compositions.push_back(std::move(c));
    }

    // Root: the Cox link from the accumulated predictor to 5-year risk.
    {
        CompositionAnnotation c;
        c.id = "C_global";
        c.junction.entry = {"eta"};
        c.junction.exit = {"risk"};
        c.junction.nodes = {"eta", "exp_eta", "surv", "risk"};
        c.junction.edges = {{"eta", "exp_eta"}, {"exp_eta", "surv"}, {"surv", "risk"}};
        c.hypothesis = "Five-year risk equals 1 - S0^exp(eta): the cluster contributions sum "
                       "into the linear predictor, which sets the risk through the baseline "
                       "survival.";
        EvidenceCheck subst;
        subst.id = "C_global.cox_link";
        subst.kind = CheckKind::substitution_equiv;
        subst.mode = CheckMode::empirical;
        subst.target.subgraph = c.junction;
        subst.output = "risk";
        subst.surrogate_family = "cox_risk";
        subst.baseline_survival = p.baseline_survival_5y;
        subst.fixed = baseline_inputs(p);
        subst.inputs = {{"age", 30.0, 74.0, {}},
                        {"sbp", 90.0, 200.0, {}},
                        {"tchdl", 1.0, 12.0, {}},
                        {"dm", 0, 0, {0, 1}},
                        {"smk", 0, 0, {0, 1, 2}}};
        subst.samples = 25;
        subst.seed = 15;
        c.evidence.push_back(std::move(subst));
        c.evidence.push_back(additivity_check("C_global.cross_cluster", p,
                                              {{"famhx", 0, 0, {0, 1}},
                                               {"tchdl", 1.0, 12.0, {}},
                                               {"af", 0, 0, {0, 1}},
                                               {"lipmed", 0, 0, {0, 1}}},
                                              16));
        c.children = {"C1", "C2", "C3", "C4"};
        m.bundle.compositions.push_back(std::move(c));
    }
    m.bundle.root = "C_global";
    return m;
}

double linear_predictor(Sex sex, const PatientInput& q) {
    const SexProfile& p = sex_profile(sex);
    double age_c = q.age - p.mean_age;
    double sbp_c = q.sbp - p.mean_sbp;
    double tchdl_c = q.tchdl - p.mean_tchdl;
    double dm = q.diabetes ? 1.0 : 0.0;
    double bpmed = q.bpmed ? 1.0 : 0.0;
    double eta = p.age * age_c;
    switch (q.ethnicity) {
        case Ethnicity::european: break;
        case Ethnicity::maori: eta += p.eth_maori; break;
        case Ethnicity::pacific: eta += p.eth_pacific; break;
        case Ethnicity::indian: eta += p.eth_indian; break;
        case Ethnicity::asian: eta += p.eth_asian; break;
    }
    eta += p.nzdep * (q.nzdep - 3.0);
    if (q.smoking == Smoking::ex) eta += p.smk_ex;
    if (q.smoking == Smoking::current) eta += p.smk_current;
    if (q.famhx) eta += p.famhx;
    if (q.af) eta += p.af;
    eta += p.dm * dm;
    eta += p.sbp * sbp_c;
    eta += p.tchdl * tchdl_c;
    eta += p.bpmed * bpmed;
    if (q.lipmed) eta += p.lipmed;
    if (q.atmed) eta += p.atmed;
    eta += p.age_dm * age_c * dm;
    eta += p.age_sbp * age_c * sbp_c;
    eta += p.bpmed_sbp * bpmed * sbp_c;
    return eta;
}

double predict_risk(Sex sex, const PatientInput& q) {
    const SexProfile& p = sex_profile(sex);
    return 1.0 - std::pow(p.baseline_survival_5y, std::exp(linear_predictor(sex, q)));
}

double hazard_ratio(double beta) { return std::exp(beta); }

double diabetes_hr_by_age(Sex sex, double age) {
    const SexProfile& p = sex_profile(sex);
    return std::exp(p.dm + p.age_dm * (age - p.mean_age));
}

std::map<std::string, double> cluster_contributions(Sex sex, const PatientInput& q) {
    const SexProfile& p = sex_profile(sex);
    double age_c = q.age - p.mean_age;
    double sbp_c = q.sbp - p.mean_sbp;
    double dm = q.diabetes ? 1.0 : 0.0;
    double bpmed = q.bpmed ? 1.0 : 0.0;

    double c1 = p.age * age_c + p.nzdep * (q.nzdep - 3.0);
    switch (q.ethnicity) {
        case Ethnicity::european: break;
        case Ethnicity::maori: c1 += p.eth_maori; break;
        case Ethnicity::pacific: c1 += p.eth_pacific; break;
        case Ethnicity::indian: c1 += p.eth_indian; break;
        case Ethnicity::asian: c1 += p.eth_asian; break;
    }
    if (q.famhx) c1 += p.famhx;

    double c2 = p.sbp * sbp_c + p.tchdl * (q.tchdl - p.mean_tchdl) +
                p.age_sbp * age_c * sbp_c + p.bpmed_sbp * bpmed * sbp_c;

    double c3 = p.dm * dm + p.age_dm * age_c * dm;
    if (q.smoking == Smoking::ex) c3 += p.smk_ex;
    if (q.smoking == Smoking::current) c3 += p.smk_current;
    if (q.af) c3 += p.af;

    double c4 = p.bpmed * bpmed;
    if (q.lipmed) c4 += p.lipmed;
    if (q.atmed) c4 += p.atmed;

    return {{"C1", c1}, {"C2", c2}, {"C3", c3}, {"C4", c4}};
}

}  // namespace annotex
