#pragma once

#include <string>

#include "crossings/verdict.hpp"

namespace crossings {

// Everything the CLI serializes for one analysis run.
struct ReportDocument {
    std::string schema_version = "1";
    std::string tf_text;         // canonical form
    std::string tf_input;        // as given on the command line
    double gain = 1.0;
    ContourConfig config;        // resolved values
    double critical_tol_scale = 1e-8;
    FactoredTF tf;
    StabilityReport report;
};

// Deterministic serializations: fixed key order, numbers through "%.12g",
// non-finite values as null. Two runs over the same input are byte-identical.
std::string to_json(const ReportDocument& doc);
std::string to_text(const ReportDocument& doc);

std::string sweep_to_json(const std::vector<SweepEntry>& entries, const std::string& tf_text);
std::string sweep_to_text(const std::vector<SweepEntry>& entries);

std::string fuzz_to_json(const FuzzResult& result, std::uint64_t seed, int max_order);
std::string fuzz_to_text(const FuzzResult& result);

// CSV with the exact column set "segment,t,omega,re,im,mag_db,phase_deg";
// omega is empty on arc/indent rows.
std::string curve_to_csv(const MappedCurve& curve);
std::string curve_to_csv(const NicholsCurve& curve);

// "%.12g" with negative zero normalized away.
std::string format_double(double v);

std::string verdict_to_string(const Verdict& v);

}  // namespace crossings
