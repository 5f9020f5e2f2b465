#pragma once

#include <map>
#include <string>
#include <vector>

#include "annotex/annotations.hpp"
#include "annotex/builders.hpp"
#include "annotex/evidence.hpp"
#include "annotex/graph.hpp"
#include "annotex/predict.hpp"

namespace annotex {

inline constexpr const char* kToolName = "annotex";
inline constexpr const char* kToolVersion = "0.1.0";

// JSON interchange. Parsing is strict: unknown keys, wrong types and
// out-of-vocabulary names raise ParseError with a /path/to/field location.
// Serialization is byte-deterministic for a given value.

ComputationalGraph parse_graph_json(const std::string& text);
std::string graph_to_json(const ComputationalGraph& graph);

AnnotationBundle parse_bundle_json(const std::string& text);
std::string bundle_to_json(const AnnotationBundle& bundle);

// Patient files carry the sex alongside the risk factor values.
struct PatientFile {
    Sex sex = Sex::women;
    PatientInput patient;
};

PatientFile parse_patient_json(const std::string& text);
std::string patient_to_json(const PatientFile& p);

TreeSpec parse_tree_spec_json(const std::string& text);

// SHA-256 of the canonical graph serialization, "sha256:<hex>".
std::string graph_digest(const ComputationalGraph& graph);

struct Report {
    std::string graph_digest;
    Metrics metrics;
    CoverageReport coverage;
    std::vector<VerificationResult> checks;  // sorted by check id
    std::map<std::string, std::string> notes;  // check id -> carried note
    WellFormedness well_formed;
    Verdict verdict;
    std::vector<std::string> warnings;
};

Report make_report(const ComputationalGraph& graph, const AnnotationBundle& bundle,
                   int arity_threshold = 10);

std::string report_to_json(const Report& r);
std::string report_to_markdown(const Report& r);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace annotex
