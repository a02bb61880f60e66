#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include "crossings/contour.hpp"
#include "crossings/errors.hpp"
#include "crossings/frequency_response.hpp"
#include "doctest.h"

using namespace crossings;

namespace {

MappedCurve mapped(const FactoredTF& tf) {
    ContourConfig cfg = resolve_config(tf, {});
    return map_response(tf, refine(build_contour(tf, cfg), tf, cfg));
}

std::vector<Crossing> crossings_of(const FactoredTF& tf, bool cusps = true) {
    ContourConfig cfg = resolve_config(tf, {});
    NyquistContour c = refine(build_contour(tf, cfg), tf, cfg);
    MappedCurve curve = map_response(tf, c);
    DetectOptions opts;
    opts.enable_cusp_handling = cusps;
    return detect_ray_crossings(curve, tf, c, opts);
}

int sum_signs(const std::vector<Crossing>& cs) {
    int n = 0;
    for (const auto& c : cs) n += c.sign;
    return n;
}

// Bisection on Im L(j w) = 0 over [lo, hi], then the real part there. Uses
// only direct evaluation, nothing from the detector.
std::pair<double, double> ray_hit(const FactoredTF& tf, double lo, double hi) {
    auto im = [&](double w) { return eval_tf(tf, Complex(0.0, w)).imag(); };
    double flo = im(lo);
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = im(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double w = 0.5 * (lo + hi);
    return {eval_tf(tf, Complex(0.0, w)).real(), w};
}

}  // namespace

TEST_CASE("phase accumulates per factor, never through a wrapped product") {
    // two right-half-plane poles: the mapped phase starts one full turn down
    FactoredTF tf = parse_tf("5(s/3+1)(s/5+1)/((s/2-1)(s/4-1))");
    MappedCurve curve = mapped(tf);
    bool found = false;
    for (const auto& p : curve.points)
        if (p.value.imag() == 0.0 && std::abs(p.value.real() - 5.0) < 1e-9) {
            CHECK(p.phase_deg == doctest::Approx(-360.0).epsilon(1e-9));
            found = true;
            break;
        }
    CHECK(found);
}

TEST_CASE("magnitude and phase reproduce the direct evaluation") {
    FactoredTF tf = parse_tf("15/((s/1+1)(s/2+1)(s/3+1))");
    MappedCurve curve = mapped(tf);
    for (std::size_t i = 0; i < curve.points.size(); i += 97) {
        const auto& p = curve.points[i];
        Complex v = p.value;
        if (std::abs(v) == 0.0) continue;
        double mag = 20.0 * std::log10(std::abs(v));
        CHECK(p.mag_db == doctest::Approx(mag).epsilon(1e-9));
        double principal = std::atan2(v.imag(), v.real()) * 180.0 / M_PI;
        double diff = std::remainder(p.phase_deg - principal, 360.0);
        CHECK(std::abs(diff) < 1e-6);
    }
}

TEST_CASE("three-pole fixture crossing against a bisection oracle") {
    FactoredTF tf = parse_tf("15/((s/1+1)(s/2+1)(s/3+1))");
    auto [x_ref, w_ref] = ray_hit(tf, 3.0, 3.7);
    CHECK(w_ref == doctest::Approx(std::sqrt(11.0)).epsilon(1e-9));
    CHECK(x_ref == doctest::Approx(-1.5).epsilon(1e-9));

    std::vector<Crossing> cs = crossings_of(tf);
    REQUIRE(cs.size() == 2);
    for (const auto& c : cs) {
        CHECK(c.sign == +1);
        CHECK(c.kind == CrossingKind::Regular);
        CHECK(c.location == doctest::Approx(x_ref).epsilon(1e-6));
        REQUIRE(c.omega.has_value());
        CHECK(std::abs(*c.omega) == doctest::Approx(w_ref).epsilon(1e-6));
    }
    CHECK(cs[0].t < cs[1].t);
    CHECK(*cs[0].omega == doctest::Approx(-*cs[1].omega).epsilon(1e-9));
}

TEST_CASE("negative crossings below the critical point") {
    FactoredTF tf = parse_tf("5(s/3+1)(s/5+1)/((s/2-1)(s/4-1))");
    std::vector<Crossing> cs = crossings_of(tf);
    REQUIRE(cs.size() == 2);
    auto [x_ref, w_ref] = ray_hit(tf, 3.0, 3.7);
    for (const auto& c : cs) {
        CHECK(c.sign == -1);
        CHECK(c.location == doctest::Approx(x_ref).epsilon(1e-6));
    }
    CHECK(x_ref == doctest::Approx(-16.0 / 4.5).epsilon(1e-9));
    CHECK(w_ref == doctest::Approx(std::sqrt(11.0)).epsilon(1e-9));
}

TEST_CASE("a crossing landing exactly on a sample is still counted once") {
    // L(j1) = 5*... the integrator fixture crosses at w = 1 with the default
    // ladder placing samples nearby; the count must be exactly two either way
    FactoredTF tf = parse_tf("5/(s(s/0.5+1)(s/2+1))");
    std::vector<Crossing> cs = crossings_of(tf);
    REQUIRE(cs.size() == 2);
    auto [x_ref, w_ref] = ray_hit(tf, 0.8, 1.3);
    CHECK(x_ref == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(w_ref == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& c : cs) {
        CHECK(c.sign == +1);
        CHECK(c.location == doctest::Approx(-2.0).epsilon(1e-6));
    }
}

TEST_CASE("start-on-ray events take their sign from the departure direction") {
    // L(0) = -1.5 < -1: the curve starts on the ray; leaving upward gives +1
    FactoredTF tf = parse_tf("1.5(s/0.5-1)/((s/2+1)(s/3+1))");
    std::vector<Crossing> cs = crossings_of(tf);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].kind == CrossingKind::CuspZero);
    CHECK(cs[0].sign == +1);
    CHECK(cs[0].location == doctest::Approx(-1.5).epsilon(1e-9));
    REQUIRE(cs[0].omega.has_value());
    CHECK(*cs[0].omega == 0.0);

    // with the handler disabled the event is silently dropped (test hook)
    CHECK(crossings_of(tf, false).empty());
}

TEST_CASE("start-on-ray event combines with regular crossings") {
    FactoredTF tf = parse_tf("1.5(s/0.5-1)/((s/2-1)(s/3-1))");
    std::vector<Crossing> cs = crossings_of(tf);
    REQUIRE(cs.size() == 3);
    CHECK(sum_signs(cs) == -1);
    int cusp_count = 0;
    for (const auto& c : cs)
        if (c.kind == CrossingKind::CuspZero) {
            ++cusp_count;
            CHECK(c.sign == +1);
            CHECK(c.location == doctest::Approx(-1.5).epsilon(1e-9));
        } else {
            CHECK(c.sign == -1);
            CHECK(c.location == doctest::Approx(-3.6).epsilon(1e-6));
        }
    CHECK(cusp_count == 1);
}

TEST_CASE("cusp sign at zero follows the low-frequency imaginary part") {
    CHECK(cusp_sign(parse_tf("1.5(s/0.5-1)/((s/2+1)(s/3+1))"), CuspAt::Zero) == +1);
    // negative gain with a fast left-half-plane zero bends the start downward
    CHECK(cusp_sign(parse_tf("-1.5(s/0.5+1)/((s/2+1)(s/3+1))"), CuspAt::Zero) == -1);
    // an even response is flat on the axis: no usable sign
    CHECK(cusp_sign(parse_tf("-2/(0.25s^2+1)"), CuspAt::Zero) == 0);
}

TEST_CASE("winding number matches the crossing sum on the fixtures") {
    for (const char* text :
         {"5/((s/1+1)(s/2+1)(s/3+1))", "15/((s/1+1)(s/2+1)(s/3+1))",
          "5(s/3+1)(s/5+1)/((s/2-1)(s/4-1))", "1.5(s/0.5-1)/((s/2+1)(s/3+1))",
          "1.5(s/0.5-1)/((s/2-1)(s/3-1))", "5/(s(s/0.5+1)(s/2+1))", "-5(s/2-1)/(s(s/1+1))"}) {
        CAPTURE(text);
        FactoredTF tf = parse_tf(text);
        ContourConfig cfg = resolve_config(tf, {});
        NyquistContour c = refine(build_contour(tf, cfg), tf, cfg);
        MappedCurve curve = map_response(tf, c);
        CHECK(winding_number(curve) == sum_signs(detect_ray_crossings(curve, tf, c, {})));
    }
}

TEST_CASE("a curve through the critical point is refused") {
    FactoredTF tf = parse_tf("10/((s/1+1)(s/2+1)(s/3+1))");
    ContourConfig cfg = resolve_config(tf, {});
    NyquistContour c = refine(build_contour(tf, cfg), tf, cfg);
    MappedCurve curve = map_response(tf, c);
    CHECK_THROWS_AS(detect_ray_crossings(curve, tf, c, {}), CriticalPointHitError);
    CHECK_THROWS_AS(winding_number(curve), CriticalPointHitError);
}

TEST_CASE("biproper plants get a single limit event") {
    // L(0) = -0.5 is off the ray but the high-frequency limit -4 is on it;
    // the curve stays below the axis on the upper contour, so the limit event
    // is the only passage and it goes upward
    FactoredTF tf = parse_tf("-0.5(s/1+1)/(s/8+1)");
    std::vector<Crossing> cs = crossings_of(tf);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].kind == CrossingKind::CuspInfinity);
    CHECK(cs[0].sign == +1);
    CHECK(cs[0].location == doctest::Approx(-4.0).epsilon(1e-9));

    // limit inside (-1, 0): no event
    FactoredTF tame = parse_tf("-0.5(s/2+1)/(s/3+1)");
    CHECK(crossings_of(tame).empty());
}
