#include <cmath>
#include <random>

#include "annotex/evidence.hpp"
#include "annotex/predict.hpp"
#include "doctest.h"

using namespace annotex;

namespace {

PatientInput random_patient(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> age(30.0, 74.0);
    std::uniform_real_distribution<double> sbp(95.0, 190.0);
    std::uniform_real_distribution<double> tchdl(2.0, 9.0);
    std::uniform_int_distribution<int> eth(0, 4), dep(1, 5), smk(0, 2), coin(0, 1);
    PatientInput p;
    p.age = age(rng);
    p.ethnicity = static_cast<Ethnicity>(eth(rng));
    p.nzdep = dep(rng);
    p.smoking = static_cast<Smoking>(smk(rng));
    p.famhx = coin(rng);
    p.af = coin(rng);
    p.diabetes = coin(rng);
    p.bpmed = coin(rng);
    p.lipmed = coin(rng);
    p.atmed = coin(rng);
    p.sbp = sbp(rng);
    p.tchdl = tchdl(rng);
    return p;
}

PatientInput reference_patient(Sex sex) {
    const SexProfile& prof = sex_profile(sex);
    PatientInput p;
    p.age = prof.mean_age;
    p.sbp = prof.mean_sbp;
    p.tchdl = prof.mean_tchdl;
    p.nzdep = 3;
    return p;
}

}  // namespace

TEST_CASE("baseline risks at the reference patient") {
    PatientInput w = reference_patient(Sex::women);
    CHECK(std::abs(linear_predictor(Sex::women, w)) <= 1e-15);
    CHECK(std::abs(predict_risk(Sex::women, w) - (1.0 - 0.9832)) <= 1e-9);

    PatientInput m = reference_patient(Sex::men);
    CHECK(std::abs(predict_risk(Sex::men, m) - (1.0 - 0.9748)) <= 1e-9);
}

TEST_CASE("graph evaluation equals the closed-form model") {
    std::mt19937_64 rng(77);
    for (Sex sex : {Sex::women, Sex::men}) {
        AnnotatedModel m = build_predict(sex);
        CHECK(m.graph.nodes().size() == 29);
        CHECK(m.graph.edges().size() == 38);
        for (int t = 0; t < 40; ++t) {
            PatientInput p = random_patient(rng);
            ActivationMap acts = evaluate(m.graph, patient_to_inputs(p));
            CHECK(std::abs(acts.at("eta") - linear_predictor(sex, p)) <= 1e-12);
            CHECK(std::abs(acts.at("risk") - predict_risk(sex, p)) <= 1e-12);
        }
    }
}

TEST_CASE("hazard ratios derived from the stored coefficients") {
    const SexProfile& w = sex_profile(Sex::women);
    CHECK(std::abs(hazard_ratio(w.age) - 1.078) <= 0.005);
    CHECK(std::abs(hazard_ratio(w.af) - 2.44) <= 0.005);
    CHECK(std::abs(hazard_ratio(w.dm) - 1.72) <= 0.005);
    CHECK(std::abs(hazard_ratio(10.0 * w.sbp) - 1.15) <= 0.005);

    const SexProfile& m = sex_profile(Sex::men);
    CHECK(std::abs(hazard_ratio(m.age) - 1.070) <= 0.005);
    CHECK(std::abs(hazard_ratio(m.lipmed) - 0.95) <= 0.005);
    CHECK(std::abs(hazard_ratio(10.0 * m.sbp) - 1.18) <= 0.005);
}

TEST_CASE("diabetes hazard ratio varies with age through the interaction") {
    for (Sex sex : {Sex::women, Sex::men}) {
        const SexProfile& prof = sex_profile(sex);
        double at_mean = diabetes_hr_by_age(sex, prof.mean_age);
        CHECK(at_mean == doctest::Approx(std::exp(prof.dm)).epsilon(1e-12));
        // The interaction coefficient is negative: the relative hazard of
        // diabetes shrinks with age.
        CHECK(diabetes_hr_by_age(sex, 40.0) > diabetes_hr_by_age(sex, 70.0));
        double formula = std::exp(prof.dm + prof.age_dm * (40.0 - prof.mean_age));
        CHECK(diabetes_hr_by_age(sex, 40.0) == doctest::Approx(formula).epsilon(1e-12));
    }
}

TEST_CASE("cluster contributions partition the linear predictor") {
    std::mt19937_64 rng(88);
    for (Sex sex : {Sex::women, Sex::men}) {
        for (int t = 0; t < 20; ++t) {
            PatientInput p = random_patient(rng);
            auto parts = cluster_contributions(sex, p);
            REQUIRE(parts.size() == 4);
            double total = 0.0;
            for (const auto& [id, v] : parts) total += v;
            CHECK(std::abs(total - linear_predictor(sex, p)) <= 1e-12);
        }
    }
}

TEST_CASE("the annotated model verifies and is explainable") {
    for (Sex sex : {Sex::women, Sex::men}) {
        AnnotatedModel m = build_predict(sex);
        CHECK(m.bundle.leaves.size() == 12);
        CHECK(m.bundle.compositions.size() == 5);
        validate_bundle(m.graph, m.bundle);
        auto results = verify_bundle(m.graph, m.bundle);
        for (const auto& [id, r] : results) {
            INFO(id << ": " << r.diagnostics);
            CHECK(r.status == CheckStatus::pass);
        }
        CoverageReport cov = explainedness(m.graph, m.bundle, results);
        CHECK(cov.structural == 1.0);
        CHECK(cov.compositional == 1.0);
        CHECK(explainability_criterion(m.graph, m.bundle, results).explainable);
    }
}

TEST_CASE("an injected coefficient fault fails exactly its own check") {
    AnnotatedModel m = build_predict(Sex::women);
    ComputationalGraph::Builder b;
    for (const Node& n : m.graph.nodes()) {
        switch (n.kind) {
            case NodeKind::input: b.input(n.id); break;
            case NodeKind::compute: b.compute(n.id, n.op); break;
            case NodeKind::output: b.output(n.id, n.op); break;
        }
    }
    for (const Edge& e : m.graph.edges()) {
        double w = e.weight;
        if (e.from == "af" && e.to == "eta") w += 0.1;  // corrupt the AF coefficient
        b.edge(e.from, e.to, w);
    }
    ComputationalGraph corrupted = b.build();

    auto results = verify_bundle(corrupted, m.bundle);
    int failing = 0;
    for (const auto& [id, r] : results)
        if (r.status != CheckStatus::pass) {
            ++failing;
            CHECK(id.rfind("A8", 0) == 0);  // only the AF annotation notices
        }
    CHECK(failing >= 1);
    CHECK_FALSE(explainability_criterion(corrupted, m.bundle, results).explainable);
}

TEST_CASE("patient validation") {
    PatientInput p = reference_patient(Sex::women);
    CHECK(validate_patient(p).empty());

    p.age = 85.0;
    CHECK(validate_patient(p).size() == 1);  // soft warning only

    PatientInput bad = reference_patient(Sex::women);
    bad.sbp = 0.0;
    CHECK_THROWS_AS(validate_patient(bad), RuntimeError);
    bad = reference_patient(Sex::women);
    bad.nzdep = 6;
    CHECK_THROWS_AS(validate_patient(bad), RuntimeError);
    bad = reference_patient(Sex::women);
    bad.tchdl = -1.0;
    CHECK_THROWS_AS(validate_patient(bad), RuntimeError);
}

TEST_CASE("treatment interaction flattens the sbp slope") {
    for (Sex sex : {Sex::women, Sex::men}) {
        const SexProfile& prof = sex_profile(sex);
        AnnotatedModel m = build_predict(sex);
        PatientInput base = reference_patient(sex);

        auto slope = [&](bool treated) {
            PatientInput hi = base, lo = base;
            hi.bpmed = lo.bpmed = treated;
            hi.sbp = base.sbp + 5.0;
            lo.sbp = base.sbp - 5.0;
            ActivationMap up = evaluate(m.graph, patient_to_inputs(hi));
            ActivationMap dn = evaluate(m.graph, patient_to_inputs(lo));
            return (up.at("eta") - dn.at("eta")) / 10.0;
        };
        CHECK(std::abs((slope(true) - slope(false)) - prof.bpmed_sbp) <= 1e-9);
    }
}
