#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <complex>

#include "crossings/contour.hpp"
#include "crossings/errors.hpp"
#include "crossings/transfer_function.hpp"
#include "doctest.h"

using namespace crossings;

namespace {

double principal_deg(Complex v) { return std::atan2(v.imag(), v.real()) * 180.0 / M_PI; }

}  // namespace

TEST_CASE("default radius clears every pole and zero by four decades") {
    FactoredTF tf = parse_tf("5/((s/1+1)(s/2+1)(s/3+1))");
    ContourConfig cfg = resolve_config(tf, {});
    CHECK(cfg.big_radius == 30000.0);
    CHECK(cfg.indent_radius > 0.0);
    CHECK(cfg.min_samples_per_decade == 64);
}

TEST_CASE("default radius also clears far closed-loop roots") {
    // Relative degree 1 with a tiny leading coefficient: 1 + L has a root
    // near s = 1000, far beyond every open-loop feature.
    FactoredTF tf = parse_tf("1000/((0.001s+1)(s+1)(s+2))");
    tf = tf.with_gain(1000.0);
    ContourConfig cfg = resolve_config(tf, {});
    RationalTF r = expand(tf);
    RealPolynomial chi = r.num + r.den;
    for (Complex root : poly_roots(chi).roots) CHECK(std::abs(root) < cfg.big_radius);
}

TEST_CASE("an explicit radius that hugs the features is refused") {
    FactoredTF tf = parse_tf("5/((s/1+1)(s/2+1)(s/3+1))");
    ContourConfig cfg;
    cfg.big_radius = 20.0;
    CHECK_THROWS_AS(resolve_config(tf, cfg), RadiusTooSmallError);
    cfg.big_radius = 500.0;
    CHECK_NOTHROW(resolve_config(tf, cfg));
}

TEST_CASE("an indent that collides with a neighboring feature is refused") {
    FactoredTF tf = parse_tf("1/(s(100s^2+1))");  // poles at 0 and +-0.1j
    ContourConfig cfg;
    cfg.indent_radius = 0.05;
    CHECK_THROWS_AS(build_contour(tf, cfg), IndentTooLargeError);
    cfg.indent_radius = 0.001;
    CHECK_NOTHROW(build_contour(tf, cfg));
}

TEST_CASE("nonsense settings are rejected up front") {
    FactoredTF tf = parse_tf("1/(s+1)");
    ContourConfig cfg;
    cfg.big_radius = -1.0;
    CHECK_THROWS_AS(resolve_config(tf, cfg), std::invalid_argument);
    cfg = {};
    cfg.min_samples_per_decade = 2;
    CHECK_THROWS_AS(resolve_config(tf, cfg), std::invalid_argument);
    cfg = {};
    cfg.max_refine_angle_deg = 0.0;
    CHECK_THROWS_AS(resolve_config(tf, cfg), std::invalid_argument);
    cfg = {};
    cfg.max_refine_angle_deg = 90.0;
    CHECK_THROWS_AS(resolve_config(tf, cfg), std::invalid_argument);
}

TEST_CASE("samples close the loop and advance monotonically") {
    for (const char* text : {"5/((s/1+1)(s/2+1)(s/3+1))", "1/(s(s/0.5+1)(s/2+1))",
                             "-5(s/2-1)/(s(s/1+1))", "1/(s^2+s+1)"}) {
        CAPTURE(text);
        NyquistContour c = build_contour(parse_tf(text));
        REQUIRE(c.samples.size() > 100);
        CHECK(c.samples.front().s == c.samples.back().s);
        CHECK(c.samples.front().t == 0.0);
        CHECK(c.samples.back().t == 1.0);
        for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) {
            CHECK(c.samples[i].t < c.samples[i + 1].t);
            CHECK(c.samples[i].s != c.samples[i + 1].s);
        }
    }
}

TEST_CASE("the sample set is exactly conjugate symmetric") {
    for (const char* text : {"5/((s/1+1)(s/2+1)(s/3+1))", "1/(s(s/0.5+1)(s/2+1))",
                             "1/((s^2+4)(s+1))"}) {
        CAPTURE(text);
        NyquistContour c = build_contour(parse_tf(text));
        auto key = [](Complex v) { return std::pair<double, double>(v.real(), v.imag()); };
        std::vector<std::pair<double, double>> direct, mirrored;
        // the closing sample repeats the first point; symmetry holds without it
        for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) {
            direct.push_back(key(c.samples[i].s));
            mirrored.push_back(key(std::conj(c.samples[i].s)));
        }
        std::sort(direct.begin(), direct.end());
        std::sort(mirrored.begin(), mirrored.end());
        CHECK(direct == mirrored);
    }
}

TEST_CASE("imaginary-axis poles and zeros are detoured, stable ones are not") {
    NyquistContour c = build_contour(parse_tf("1/(s(s/0.5+1)(s/2+1))"));
    REQUIRE(c.detoured_poles.size() == 1);
    CHECK(c.detoured_poles[0] == Complex(0.0, 0.0));
    CHECK(c.detoured_zeros.empty());

    c = build_contour(parse_tf("1/((s^2+4)(s+1))"));
    REQUIRE(c.detoured_poles.size() == 1);
    CHECK(c.detoured_poles[0] == Complex(0.0, 2.0));

    c = build_contour(parse_tf("(s^2+9)/((s+1)(s+2)(s+3))"));
    REQUIRE(c.detoured_zeros.size() == 1);
    CHECK(c.detoured_zeros[0] == Complex(0.0, 3.0));

    c = build_contour(parse_tf("5/((s/1+1)(s/2+1)(s/3+1))"));
    CHECK(c.detoured_poles.empty());
    CHECK(c.detoured_zeros.empty());

    // nearly-imaginary quadratic is not structurally on the axis
    c = build_contour(parse_tf("1/((s^2+0.001s+4)(s+1))"));
    CHECK(c.detoured_poles.empty());
}

TEST_CASE("every detoured frequency is avoided by the indent radius") {
    FactoredTF tf = parse_tf("1/(s(s^2+4)(s/3+1))");
    NyquistContour c = build_contour(tf);
    REQUIRE(c.detoured_poles.size() == 2);
    for (const auto& smp : c.samples) {
        CHECK(std::abs(smp.s) >= 0.999 * c.indent_radius);
        CHECK(std::abs(smp.s - Complex(0.0, 2.0)) >= 0.999 * c.indent_radius);
        CHECK(std::abs(smp.s - Complex(0.0, -2.0)) >= 0.999 * c.indent_radius);
    }
}

TEST_CASE("indent arcs bulge into the right half plane") {
    NyquistContour c = build_contour(parse_tf("1/(s(s+1))"));
    bool saw_indent = false;
    for (const auto& smp : c.samples)
        if (smp.segment == SegmentKind::Indent) {
            saw_indent = true;
            CHECK(smp.s.real() >= -1e-18);
        }
    CHECK(saw_indent);
}

TEST_CASE("pair midpoints follow the local geometry") {
    ContourSample a, b;
    a.segment = SegmentKind::Axis;
    b.segment = SegmentKind::Axis;
    Complex lo(0.0, 1.0), hi(0.0, 4.0);
    Complex mid = contour_pair_midpoint(a, b, lo, hi);
    CHECK(mid.real() == 0.0);
    CHECK(mid.imag() == doctest::Approx(2.0).epsilon(1e-12));

    mid = contour_pair_midpoint(a, b, Complex(0.0, -4.0), Complex(0.0, -1.0));
    CHECK(mid.imag() == doctest::Approx(-2.0).epsilon(1e-12));

    // arc bracket: midpoint stays on the circle
    ContourSample c, d;
    c.segment = SegmentKind::Arc;
    d.segment = SegmentKind::Arc;
    c.center = Complex(0.0, 0.0);
    c.radius = 100.0;
    d.center = c.center;
    d.radius = c.radius;
    Complex p = 100.0 * std::polar(1.0, 1.0);
    Complex q = 100.0 * std::polar(1.0, 0.5);
    mid = contour_pair_midpoint(c, d, p, q);
    CHECK(std::abs(mid) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(principal_deg(mid) == doctest::Approx(0.75 * 180.0 / M_PI).epsilon(1e-9));
}

TEST_CASE("refinement bounds the mapped step of both the curve and its shift") {
    FactoredTF tf = parse_tf("15/((s/1+1)(s/2+1)(s/3+1))");
    ContourConfig cfg = resolve_config(tf, {});
    NyquistContour c = refine(build_contour(tf, cfg), tf, cfg);
    CHECK(c.refinement_complete);
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) {
        Complex v0 = eval_tf(tf, c.samples[i].s);
        Complex v1 = eval_tf(tf, c.samples[i + 1].s);
        for (Complex shift : {Complex(0.0, 0.0), Complex(1.0, 0.0)}) {
            Complex a = v0 + shift, b = v1 + shift;
            if (std::abs(a) < 1e-12 || std::abs(b) < 1e-12) continue;
            worst = std::max(worst, std::abs(principal_deg(b / a)));
        }
    }
    CHECK(worst <= cfg.max_refine_angle_deg * (1.0 + 1e-9));
}

TEST_CASE("refinement only inserts points, never moves them") {
    FactoredTF tf = parse_tf("5/(s(s/0.5+1)(s/2+1))");
    ContourConfig cfg = resolve_config(tf, {});
    NyquistContour base = build_contour(tf, cfg);
    NyquistContour fine = refine(base, tf, cfg);
    CHECK(fine.samples.size() > base.samples.size());
    std::vector<std::pair<double, double>> coarse_set;
    for (const auto& smp : fine.samples) coarse_set.push_back({smp.s.real(), smp.s.imag()});
    std::sort(coarse_set.begin(), coarse_set.end());
    for (const auto& smp : base.samples) {
        std::pair<double, double> k{smp.s.real(), smp.s.imag()};
        CHECK(std::binary_search(coarse_set.begin(), coarse_set.end(), k));
    }
}

TEST_CASE("construction is deterministic") {
    FactoredTF tf = parse_tf("1/(s(s/0.5+1)(s/2+1))");
    ContourConfig cfg = resolve_config(tf, {});
    NyquistContour a = refine(build_contour(tf, cfg), tf, cfg);
    NyquistContour b = refine(build_contour(tf, cfg), tf, cfg);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].s == b.samples[i].s);
        CHECK(a.samples[i].t == b.samples[i].t);
    }
}
