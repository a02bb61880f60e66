#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <string>
#include <vector>

#include "crossings/errors.hpp"
#include "crossings/verdict.hpp"
#include "doctest.h"

using namespace crossings;

namespace {

struct Fixture {
    const char* text;
    int n_p;
    int n;
    int n_z;
    VerdictKind kind;
};

bool contains(const std::string& s, const std::string& needle) {
    return s.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("reference plants at their bracketing gains") {
    const Fixture table[] = {
        {"5/((s/1+1)(s/2+1)(s/3+1))", 0, 0, 0, VerdictKind::Stable},
        {"15/((s/1+1)(s/2+1)(s/3+1))", 0, 2, 2, VerdictKind::Unstable},
        {"5(s/3+1)(s/5+1)/((s/2-1)(s/4-1))", 2, -2, 0, VerdictKind::Stable},
        {"1(s/3+1)(s/5+1)/((s/2-1)(s/4-1))", 2, 0, 2, VerdictKind::Unstable},
        {"0.5(s/0.5-1)/((s/2+1)(s/3+1))", 0, 0, 0, VerdictKind::Stable},
        {"1.5(s/0.5-1)/((s/2+1)(s/3+1))", 0, 1, 1, VerdictKind::Unstable},
        {"0.5(s/0.5-1)/((s/2-1)(s/3-1))", 2, -2, 0, VerdictKind::Stable},
        {"1.5(s/0.5-1)/((s/2-1)(s/3-1))", 2, -1, 1, VerdictKind::Unstable},
        {"1/(s(s/0.5+1)(s/2+1))", 0, 0, 0, VerdictKind::Stable},
        {"5/(s(s/0.5+1)(s/2+1))", 0, 2, 2, VerdictKind::Unstable},
        {"-1(s/2-1)/(s(s/1+1))", 0, 0, 0, VerdictKind::Stable},
        {"-5(s/2-1)/(s(s/1+1))", 0, 2, 2, VerdictKind::Unstable},
    };
    for (const Fixture& f : table) {
        CAPTURE(f.text);
        StabilityReport rep = assess(parse_tf(f.text));
        CHECK(rep.n_p == f.n_p);
        CHECK(rep.n_by_method.nyquist == f.n);
        CHECK(rep.n_by_method.nichols_single == f.n);
        CHECK(rep.n_by_method.nichols_multi == f.n);
        CHECK(rep.n_by_method.winding == f.n);
        CHECK(rep.n_z == f.n_z);
        CHECK(rep.verdict.kind == f.kind);
        CHECK(rep.verdict.reason.empty());
        CHECK(rep.oracle_agrees);
        CHECK(rep.oracle.closed_loop_rhp == f.n_z);
        CHECK(rep.oracle.routh_rhp == f.n_z);
        CHECK_FALSE(rep.oracle.indeterminate);
    }
}

TEST_CASE("flipping the gain sign of the sign-sensitive plant destabilizes") {
    // the same plant that is stable at gain -1 goes unstable at +1 and +5
    FactoredTF base = parse_tf("-1(s/2-1)/(s(s/1+1))");
    for (double k : {1.0, 5.0}) {
        CAPTURE(k);
        StabilityReport rep = assess(base.with_gain(k));
        CHECK(rep.verdict.kind == VerdictKind::Unstable);
        CHECK(rep.n_z == 1);
        CHECK(rep.oracle_agrees);
    }
}

TEST_CASE("the curve through the critical point gives a marginal verdict") {
    StabilityReport rep = assess(parse_tf("10/((s/1+1)(s/2+1)(s/3+1))"));
    CHECK(rep.verdict.kind == VerdictKind::Marginal);
    CHECK_FALSE(rep.verdict.reason.empty());
    CHECK(rep.n_z == 0);
    CHECK(rep.verdict.n_z == 0);
    // closed-loop poles sit on the axis, so the oracle abstains too
    CHECK(rep.oracle.indeterminate);
    CHECK(rep.oracle_agrees);
}

TEST_CASE("near cancellation is refused rather than counted") {
    StabilityReport rep = assess(parse_tf("(s/2-1)/((s/2-1)(s+1))"));
    CHECK(rep.verdict.kind == VerdictKind::Marginal);
    CHECK(contains(rep.verdict.reason, "cancel"));
    // the cancelling pair is right-half-plane: after cancellation the loop
    // looks stable but the internal mode is still there, so the verdict stays
    // marginal even though the root oracle can decide; the mismatch is
    // reported, not hidden
    CHECK_FALSE(rep.oracle.indeterminate);
    CHECK(rep.oracle.closed_loop_rhp == 1);
    CHECK_FALSE(rep.oracle_agrees);

    StabilityReport lhp = assess(parse_tf("(s/2+1)/((s/2+1)(s+1))"));
    CHECK(lhp.verdict.kind == VerdictKind::Marginal);
    CHECK(contains(lhp.verdict.reason, "cancel"));
}

TEST_CASE("an open-loop pole hugging the axis is marginal") {
    StabilityReport rep = assess(parse_tf("1/(1e12s+1)"));
    CHECK(rep.verdict.kind == VerdictKind::Marginal);
    CHECK_FALSE(rep.verdict.reason.empty());
    CHECK(rep.n_p == -1);
}

TEST_CASE("a response flat on the ray cannot be counted") {
    // even response: the whole curve lies on the real axis, the start sits
    // left of the critical point and never leaves the ray
    StabilityReport rep = assess(parse_tf("-2/(0.25s^2+1)"));
    CHECK(rep.verdict.kind == VerdictKind::Marginal);
    CHECK(contains(rep.verdict.reason, "flat"));
    // the root oracle can decide this one; the disagreement is reported
    CHECK_FALSE(rep.oracle.indeterminate);
    CHECK(rep.oracle.closed_loop_rhp == 1);
    CHECK_FALSE(rep.oracle_agrees);

    // biproper even response, flat at both ends, closed-loop roots on axis
    StabilityReport rd0 = assess(parse_tf("-3(0.25s^2+1)/(0.25s^2+2)"));
    CHECK(rd0.verdict.kind == VerdictKind::Marginal);
    CHECK(contains(rd0.verdict.reason, "flat"));
    CHECK(rd0.oracle.indeterminate);
    CHECK(rd0.oracle_agrees);
}

TEST_CASE("disabling start-event handling trips the cross-method guard") {
    // the winding number does not depend on the start-event handler, so
    // dropping the event leaves the detectors short by one and the
    // disagreement surfaces instead of a silent wrong verdict
    AssessOptions opts;
    opts.enable_cusp_handling = false;
    CHECK_THROWS_AS(assess(parse_tf("1.5(s/0.5-1)/((s/2+1)(s/3+1))"), opts),
                    MethodDisagreementError);
}

TEST_CASE("gain sweep preserves order and matches single assessments") {
    FactoredTF tf = parse_tf("1/((s/1+1)(s/2+1)(s/3+1))");
    std::vector<double> gains = {5.0, 15.0, 1.0};
    std::vector<SweepEntry> entries = gain_sweep(tf, gains);
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].gain == 5.0);
    CHECK(entries[1].gain == 15.0);
    CHECK(entries[2].gain == 1.0);
    CHECK(entries[0].report.verdict.kind == VerdictKind::Stable);
    CHECK(entries[1].report.verdict.kind == VerdictKind::Unstable);
    CHECK(entries[1].report.n_z == 2);
    CHECK(entries[2].report.verdict.kind == VerdictKind::Stable);
    for (const auto& e : entries) CHECK(e.report.oracle_agrees);
}

TEST_CASE("oracle can be skipped") {
    AssessOptions opts;
    opts.run_oracle = false;
    StabilityReport rep = assess(parse_tf("5/((s/1+1)(s/2+1)(s/3+1))"), opts);
    CHECK(rep.oracle.note == "skipped");
    CHECK_FALSE(rep.oracle_agrees);
    CHECK(rep.oracle.closed_loop_rhp == -1);
}

TEST_CASE("origin poles are reported as detoured, not counted") {
    StabilityReport rep = assess(parse_tf("1/(s(s/0.5+1)(s/2+1))"));
    CHECK(rep.n_p == 0);
    REQUIRE_FALSE(rep.warnings.empty());
    CHECK(contains(rep.warnings.front(), "origin"));
}

TEST_CASE("open-loop right-half-plane pole counting") {
    CHECK(count_open_loop_rhp_poles(parse_tf("1/((s/2-1)(s/4-1))")) == 2);
    CHECK(count_open_loop_rhp_poles(parse_tf("1/((s/2+1)(s/3+1))")) == 0);
    // imaginary-axis poles are detoured outside the contour, never counted
    CHECK(count_open_loop_rhp_poles(parse_tf("1/((s^2+4)(s+1))")) == 0);
    CHECK(count_open_loop_rhp_poles(parse_tf("1/s")) == 0);
    // right-half-plane quadratic pair
    CHECK(count_open_loop_rhp_poles(parse_tf("1/(s^2-s+1)")) == 2);
    CHECK_THROWS_AS(count_open_loop_rhp_poles(parse_tf("1/(1e12s+1)")), MarginalPoleError);
}

TEST_CASE("direct oracle checks") {
    OracleResult stable = oracle_assess(parse_tf("5/((s/1+1)(s/2+1)(s/3+1))"));
    CHECK(stable.closed_loop_rhp == 0);
    CHECK(stable.routh_rhp == 0);
    CHECK_FALSE(stable.indeterminate);

    OracleResult unstable = oracle_assess(parse_tf("15/((s/1+1)(s/2+1)(s/3+1))"));
    CHECK(unstable.closed_loop_rhp == 2);
    CHECK(unstable.routh_rhp == 2);

    OracleResult marginal = oracle_assess(parse_tf("10/((s/1+1)(s/2+1)(s/3+1))"));
    CHECK(marginal.indeterminate);
    CHECK_FALSE(marginal.note.empty());
}

TEST_CASE("random plant generation is deterministic") {
    for (std::uint64_t seed : {1ull, 42ull, 977ull}) {
        FactoredTF a = random_plant(seed, 6);
        FactoredTF b = random_plant(seed, 6);
        CHECK(structurally_equal(a, b, 0.0));
        CHECK(a.denominator_degree() >= a.numerator_degree());
        CHECK(a.denominator_degree() <= 6);
    }
}

TEST_CASE("differential fuzzing agrees with the oracle") {
    FuzzResult r = fuzz_verify(7, 60, 5);
    CHECK(r.total == 60);
    CHECK(r.decided + r.skipped_marginal + r.skipped_numeric == r.total);
    CHECK(r.decided > 30);
    CHECK(r.agreements == r.decided);
    CHECK(r.disagreements.empty());

    FuzzResult again = fuzz_verify(7, 60, 5);
    CHECK(again.decided == r.decided);
    CHECK(again.agreements == r.agreements);
    CHECK(again.skipped_marginal == r.skipped_marginal);
    CHECK(again.skipped_numeric == r.skipped_numeric);
}

TEST_CASE("thread cap follows the environment override") {
    setenv("CROSSINGS_THREADS", "1", 1);
    CHECK(thread_cap() == 1);
    FuzzResult capped = fuzz_verify(5, 40, 5);
    unsetenv("CROSSINGS_THREADS");
    CHECK(thread_cap() >= 1);
    FuzzResult wide = fuzz_verify(5, 40, 5);
    CHECK(capped.decided == wide.decided);
    CHECK(capped.agreements == wide.agreements);
    CHECK(capped.skipped_marginal == wide.skipped_marginal);
}
