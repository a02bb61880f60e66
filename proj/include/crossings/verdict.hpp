#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossings/nichols.hpp"

namespace crossings {

enum class VerdictKind { Stable, Unstable, Marginal };

struct Verdict {
    VerdictKind kind = VerdictKind::Stable;
    int n_z = 0;             // closed-loop RHP pole count when Unstable
    std::string reason;      // set when Marginal
};

struct MethodCounts {
    int nyquist = 0;
    int nichols_single = 0;
    int nichols_multi = 0;
    int winding = 0;
};

struct OracleResult {
    int closed_loop_rhp = -1;
    int routh_rhp = -1;
    bool indeterminate = false;
    std::string note;
};

struct StabilityReport {
    int n_p = 0;
    MethodCounts n_by_method;
    int n_z = 0;
    Verdict verdict;
    std::vector<Crossing> nyquist_crossings;
    std::vector<Crossing> nichols_single_crossings;
    std::vector<Crossing> nichols_multi_crossings;
    OracleResult oracle;
    bool oracle_agrees = false;
    std::vector<std::string> warnings;
    int relative_degree = 0;
    bool improper = false;
};

struct AssessOptions {
    ContourConfig contour;
    double critical_tol_scale = 1e-8;
    double cancel_tol = 1e-6;
    bool run_oracle = true;
    bool enable_cusp_handling = true;  // test hook, forwarded to the detectors
};

// Open-loop poles with strictly positive real part, from the exact factor
// roots. Imaginary-axis poles (the detoured ones) are excluded; a pole inside
// the marginal band that is not structurally on the axis throws
// MarginalPoleError.
int count_open_loop_rhp_poles(const FactoredTF& tf);
int count_open_loop_rhp_poles(const FactoredTF& tf, std::vector<std::string>* warnings);

// Full pipeline: contour, map, ray crossings, both Nichols charts, winding
// number; all four counts must agree (MethodDisagreementError otherwise,
// never reconciled silently). Any critical-point hit, flat cusp, marginal
// pole or near-cancellation downgrades the verdict to Marginal.
StabilityReport assess(const FactoredTF& tf, const AssessOptions& opts = {});

// Independent ground truth: closed-loop RHP count from the roots of num+den
// and from the Routh array; the two must agree or the result is flagged
// indeterminate.
OracleResult oracle_assess(const FactoredTF& tf);

struct SweepEntry {
    double gain = 0.0;
    StabilityReport report;
};

std::vector<SweepEntry> gain_sweep(const FactoredTF& tf, const std::vector<double>& gains,
                                   const AssessOptions& opts = {});

struct FuzzResult {
    int total = 0;
    int decided = 0;
    int agreements = 0;
    int skipped_marginal = 0;
    int skipped_numeric = 0;
    std::vector<FactoredTF> disagreements;  // shrunk by factor removal
};

// Differential test: random factored plants (real factors, magnitudes
// log-uniform in [0.1, 10], integrator order 0 or 1, gain log-uniform in
// [0.1, 100] with random sign), assess vs oracle_assess, marginal instances
// skipped. Deterministic for a fixed seed.
FuzzResult fuzz_verify(std::uint64_t seed, int count, int max_order);

// Deterministic per-instance generator used by fuzz_verify, exposed so other
// test corpora can reuse the distribution.
FactoredTF random_plant(std::uint64_t seed, int max_order);

// Thread cap for the embarrassingly parallel drivers: CROSSINGS_THREADS
// truncates hardware concurrency when set.
int thread_cap();

}  // namespace crossings
