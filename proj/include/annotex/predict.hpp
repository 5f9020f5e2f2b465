#pragma once

#include <map>
#include <string>
#include <vector>

#include "annotex/builders.hpp"

namespace annotex {

enum class Sex { women, men };

const char* sex_name(Sex s);
std::optional<Sex> sex_from_name(const std::string& name);

enum class Ethnicity { european = 0, maori = 1, pacific = 2, indian = 3, asian = 4 };
enum class Smoking { never = 0, ex = 1, current = 2 };

// Sex-specific model constants. Coefficients published only as hazard ratios
// are stored as ln(HR) rounded to 4 decimals. The Cox intercept is absorbed
// into the baseline survival, so there is no beta_0.
struct SexProfile {
    Sex sex;
    double mean_age;
    double mean_sbp;
    double mean_tchdl;
    double baseline_survival_5y;

    double age;
    double eth_maori, eth_pacific, eth_indian, eth_asian;
    double nzdep;
    double smk_ex, smk_current;
    double famhx;
    double af;
    double dm;
    double sbp;
    double tchdl;
    double bpmed, lipmed, atmed;
    double age_dm;
    double age_sbp;
    double bpmed_sbp;
};

const SexProfile& sex_profile(Sex s);

struct PatientInput {
    double age = 0.0;
    Ethnicity ethnicity = Ethnicity::european;
    int nzdep = 3;
    Smoking smoking = Smoking::never;
    bool famhx = false;
    bool af = false;
    bool diabetes = false;
    bool bpmed = false;
    bool lipmed = false;
    bool atmed = false;
    double sbp = 0.0;
    double tchdl = 0.0;
};

// Throws on hard violations (sbp/tchdl <= 0, nzdep outside 1..5); returns
// warnings for soft ones (age outside the 30-74 cohort).
std::vector<std::string> validate_patient(const PatientInput& p);

ActivationMap patient_to_inputs(const PatientInput& p);

// Full graph plus the 17-annotation hierarchy (12 leaves, C1-C4, C_global).
AnnotatedModel build_predict(Sex sex);

double linear_predictor(Sex sex, const PatientInput& p);
double predict_risk(Sex sex, const PatientInput& p);
double hazard_ratio(double beta);
double diabetes_hr_by_age(Sex sex, double age);

// Per-cluster additive contributions to the linear predictor; keys are the
// composition ids C1..C4.
std::map<std::string, double> cluster_contributions(Sex sex, const PatientInput& p);

}  // namespace annotex
