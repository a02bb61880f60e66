#include "crossings/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "crossings/errors.hpp"

namespace crossings {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::size_t kSampleCap = std::size_t{1} << 20;

struct Detours {
    std::vector<double> mus;  // distinct detour heights, ascending, >= 0
    std::vector<Complex> poles;
    std::vector<Complex> zeros;
};

void add_mu(std::vector<double>& mus, double mu) {
    for (double m : mus) {
        if (std::abs(m - mu) <= 1e-9 * (1.0 + mu)) return;
    }
    mus.push_back(mu);
}

// Structural imaginary-axis roots only: exact zero constant term (origin) or
// an exactly even quadratic with same-sign ends (conjugate pair on the axis).
// Roots merely near the axis are a marginality question, handled elsewhere.
void scan_factors(const std::vector<RealPolynomial>& fs, std::vector<Complex>& pts,
                  std::vector<double>& mus) {
    for (const auto& f : fs) {
        if (f.degree() >= 1 && f[0] == 0.0) {
            pts.emplace_back(0.0, 0.0);
            add_mu(mus, 0.0);
        }
        if (f.degree() == 2 && f[1] == 0.0 && f[0] != 0.0 && f[0] * f[2] > 0.0) {
            double mu = std::sqrt(f[0] / f[2]);
            pts.emplace_back(0.0, mu);
            add_mu(mus, mu);
        }
    }
}

Detours collect_detours(const FactoredTF& tf) {
    Detours d;
    if (tf.integrator_order > 0) {
        d.poles.emplace_back(0.0, 0.0);
        add_mu(d.mus, 0.0);
    }
    scan_factors(tf.pole_factors, d.poles, d.mus);
    scan_factors(tf.zero_factors, d.zeros, d.mus);
    std::sort(d.mus.begin(), d.mus.end());
    return d;
}

double max_feature_magnitude(const FactoredTF& tf) {
    double feat = 0.0;
    auto scan = [&feat](const std::vector<RealPolynomial>& fs) {
        for (const auto& f : fs)
            for (Complex r : factor_roots(f)) feat = std::max(feat, std::abs(r));
    };
    scan(tf.zero_factors);
    scan(tf.pole_factors);
    return feat;
}

// Cauchy bound on the closed-loop pole magnitudes (roots of num + den). The
// contour has to enclose these too: a large loop gain over a small leading
// coefficient pushes a closed-loop root far beyond every open-loop feature,
// and a radius chosen from the open-loop roots alone would leave it outside.
double closed_loop_root_bound(const FactoredTF& tf) {
    RationalTF r = expand(tf);
    RealPolynomial chi = r.num + r.den;
    const std::vector<double>& c = chi.coeffs();
    double lead = std::abs(c.back());
    if (!(lead > 1e-300)) return 0.0;
    double bound = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i)
        bound = std::max(bound, std::abs(c[i]) / lead);
    return 1.0 + bound;
}

double min_feature_magnitude(const FactoredTF& tf) {
    double feat = std::numeric_limits<double>::infinity();
    auto scan = [&feat](const std::vector<RealPolynomial>& fs) {
        for (const auto& f : fs)
            for (Complex r : factor_roots(f)) {
                double m = std::abs(r);
                if (m > 1e-30) feat = std::min(feat, m);
            }
    };
    scan(tf.zero_factors);
    scan(tf.pole_factors);
    return std::isfinite(feat) ? feat : 1.0;
}

// Narrowest gap the indents must fit into: between adjacent detour heights,
// from the lowest positive one down to the origin, and up to the big radius.
double detour_spacing(const Detours& d, double big_radius) {
    if (d.mus.empty()) return big_radius;
    double gap = big_radius - d.mus.back();
    for (std::size_t i = 0; i + 1 < d.mus.size(); ++i)
        gap = std::min(gap, d.mus[i + 1] - d.mus[i]);
    if (d.mus.front() > 0.0) gap = std::min(gap, d.mus.front());
    return gap;
}

double deg_cos(double deg) {
    if (deg == 0.0) return 1.0;
    if (deg == 90.0 || deg == -90.0) return 0.0;
    if (deg == 180.0 || deg == -180.0) return -1.0;
    return std::cos(deg * kPi / 180.0);
}

double deg_sin(double deg) {
    if (deg == 0.0 || deg == 180.0 || deg == -180.0) return 0.0;
    if (deg == 90.0) return 1.0;
    if (deg == -90.0) return -1.0;
    return std::sin(deg * kPi / 180.0);
}

ContourPiece circle_piece(SegmentKind kind, Complex center, double radius, double deg_from,
                          double deg_to, int n) {
    ContourPiece p;
    p.kind = kind;
    p.center = center;
    p.radius = radius;
    p.pts.reserve(n);
    for (int i = 0; i < n; ++i) {
        double a = deg_from + (deg_to - deg_from) * static_cast<double>(i) / (n - 1);
        if (i == n - 1) a = deg_to;
        p.pts.emplace_back(center + radius * Complex(deg_cos(a), deg_sin(a)));
    }
    return p;
}

ContourPiece axis_piece(double w_lo, double w_hi, const ContourConfig& cfg, double lin_top_hint,
                        bool approach_lo, bool approach_hi, double eps) {
    std::vector<double> w;
    w.push_back(w_lo);
    w.push_back(w_hi);

    double ladder_lo = w_lo;
    if (w_lo == 0.0) {
        // linear toe from DC up to the first ladder rung
        double lin_top = std::min(lin_top_hint, w_hi * 1e-3);
        if (!(lin_top > 0.0)) lin_top = w_hi / 16.0;
        for (int i = 1; i <= 8; ++i) w.push_back(lin_top * i / 8.0);
        ladder_lo = lin_top;
    }
    if (ladder_lo > 0.0 && w_hi > ladder_lo) {
        double decades = std::log10(w_hi / ladder_lo);
        int n = std::max(2, static_cast<int>(std::ceil(decades * cfg.min_samples_per_decade)));
        double ratio = w_hi / ladder_lo;
        for (int i = 1; i < n; ++i)
            w.push_back(ladder_lo * std::pow(ratio, static_cast<double>(i) / n));
    }
    double mid = 0.5 * (w_lo + w_hi);
    if (approach_hi && eps > 0.0) {
        double mu = w_hi + eps;
        for (int k = 1; k < 60; ++k) {
            double x = mu - eps * std::pow(2.0, k);
            if (!(x > mid)) break;
            w.push_back(x);
        }
    }
    if (approach_lo && eps > 0.0) {
        double mu = w_lo - eps;
        for (int k = 1; k < 60; ++k) {
            double x = mu + eps * std::pow(2.0, k);
            if (!(x < mid)) break;
            w.push_back(x);
        }
    }
    std::sort(w.begin(), w.end());
    std::vector<double> uniq;
    for (double x : w) {
        if (x < w_lo || x > w_hi) continue;
        if (!uniq.empty() && x - uniq.back() <= 1e-13 * std::max(1.0, std::abs(x))) continue;
        uniq.push_back(x);
    }

    ContourPiece p;
    p.kind = SegmentKind::Axis;
    p.pts.reserve(uniq.size());
    for (double x : uniq) p.pts.emplace_back(0.0, x);
    return p;
}

std::vector<Complex> tf_factor_values(const FactoredTF& tf, Complex s) {
    std::vector<Complex> v;
    v.reserve(tf.zero_factors.size() + tf.pole_factors.size() + (tf.integrator_order ? 1 : 0));
    for (const auto& f : tf.zero_factors) v.push_back(f.eval(s));
    for (const auto& f : tf.pole_factors) v.push_back(f.eval(s));
    if (tf.integrator_order > 0) v.push_back(s);
    return v;
}

double principal_deg(Complex q) { return std::arg(q) * 180.0 / kPi; }

}  // namespace

Complex contour_pair_midpoint(const ContourSample& a, const ContourSample& b, Complex lo,
                              Complex hi) {
    auto on_circle = [](const ContourSample& tag, Complex p) {
        return tag.radius > 0.0 &&
               std::abs(std::abs(p - tag.center) - tag.radius) <= 1e-9 * tag.radius;
    };
    const ContourSample* tag = nullptr;
    if (b.segment != SegmentKind::Axis && on_circle(b, lo) && on_circle(b, hi))
        tag = &b;
    else if (a.segment != SegmentKind::Axis && on_circle(a, lo) && on_circle(a, hi))
        tag = &a;
    if (tag) {
        double ta = std::atan2((lo - tag->center).imag(), (lo - tag->center).real());
        double tb = std::atan2((hi - tag->center).imag(), (hi - tag->center).real());
        if (tb - ta > kPi) tb -= 2.0 * kPi;
        if (ta - tb > kPi) tb += 2.0 * kPi;
        return tag->center + tag->radius * std::exp(Complex(0.0, 0.5 * (ta + tb)));
    }
    if (lo.real() == 0.0 && hi.real() == 0.0) {
        double wa = lo.imag(), wb = hi.imag();
        if (wa * wb > 0.0)
            return Complex(0.0,
                           (wa > 0.0 ? 1.0 : -1.0) * std::sqrt(std::abs(wa) * std::abs(wb)));
        return Complex(0.0, 0.5 * (wa + wb));
    }
    return 0.5 * (lo + hi);
}

ContourConfig resolve_config(const FactoredTF& tf, ContourConfig cfg) {
    if (cfg.min_samples_per_decade < 4)
        throw std::invalid_argument("min_samples_per_decade must be at least 4");
    if (!(cfg.max_refine_angle_deg > 0.0) || cfg.max_refine_angle_deg > 45.0)
        throw std::invalid_argument("max_refine_angle_deg must lie in (0, 45]");
    if (cfg.big_radius < 0.0 || !std::isfinite(cfg.big_radius))
        throw std::invalid_argument("big_radius must be finite and nonnegative");
    if (cfg.indent_radius < 0.0 || !std::isfinite(cfg.indent_radius))
        throw std::invalid_argument("indent_radius must be finite and nonnegative");

    double feat = std::max(1.0, max_feature_magnitude(tf));
    if (cfg.big_radius == 0.0)
        cfg.big_radius = std::max(1e4 * feat, 10.0 * closed_loop_root_bound(tf));
    if (cfg.big_radius <= 10.0 * feat)
        throw RadiusTooSmallError("big radius " + std::to_string(cfg.big_radius) +
                                  " does not clear the largest pole/zero magnitude " +
                                  std::to_string(feat) + " by a factor of 10");

    Detours d = collect_detours(tf);
    double spacing = detour_spacing(d, cfg.big_radius);
    if (cfg.indent_radius == 0.0) cfg.indent_radius = 1e-4 * std::min(1.0, spacing);
    if (!d.mus.empty() && cfg.indent_radius >= 0.45 * spacing)
        throw IndentTooLargeError("indent radius " + std::to_string(cfg.indent_radius) +
                                  " collides with neighboring contour features (gap " +
                                  std::to_string(spacing) + ")");
    return cfg;
}

NyquistContour build_contour(const FactoredTF& tf, const ContourConfig& cfg_in) {
    ContourConfig cfg = resolve_config(tf, cfg_in);
    Detours d = collect_detours(tf);

    NyquistContour c;
    c.big_radius = cfg.big_radius;
    c.indent_radius = cfg.indent_radius;
    c.detoured_poles = d.poles;
    c.detoured_zeros = d.zeros;

    const double R = cfg.big_radius;
    const double eps = cfg.indent_radius;
    const bool origin_detour = !d.mus.empty() && d.mus.front() == 0.0;
    const double lin_top_hint = 1e-3 * std::min(1.0, min_feature_magnitude(tf));

    std::vector<double> interior;
    for (double mu : d.mus)
        if (mu > 0.0) interior.push_back(mu);

    if (origin_detour)
        c.upper.push_back(circle_piece(SegmentKind::Indent, {0.0, 0.0}, eps, 0.0, 90.0, 33));

    double w = origin_detour ? eps : 0.0;
    bool after_indent = origin_detour;
    for (double mu : interior) {
        c.upper.push_back(
            axis_piece(w, mu - eps, cfg, lin_top_hint, after_indent, true, eps));
        c.upper.push_back(
            circle_piece(SegmentKind::Indent, {0.0, mu}, eps, -90.0, 90.0, 65));
        w = mu + eps;
        after_indent = true;
    }
    c.upper.push_back(axis_piece(w, R, cfg, lin_top_hint, after_indent, false, eps));
    c.upper.push_back(circle_piece(SegmentKind::Arc, {0.0, 0.0}, R, 90.0, 0.0, 129));

    c.rebuild_samples();
    return c;
}

void NyquistContour::rebuild_samples() {
    samples.clear();

    auto push = [this](Complex s, SegmentKind kind, Complex center, double radius) {
        if (!samples.empty()) {
            const Complex& prev = samples.back().s;
            if (prev.real() == s.real() && prev.imag() == s.imag()) return;
        }
        ContourSample smp;
        smp.s = s;
        smp.segment = kind;
        smp.center = center;
        smp.radius = radius;
        samples.push_back(smp);
    };

    // lower half: mirrored pre-arc pieces in reverse order
    std::size_t arc_at = upper.size();
    for (std::size_t i = 0; i < upper.size(); ++i)
        if (upper[i].kind == SegmentKind::Arc) arc_at = i;

    for (std::size_t i = arc_at; i-- > 0;) {
        const ContourPiece& p = upper[i];
        for (std::size_t k = p.pts.size(); k-- > 0;)
            push(std::conj(p.pts[k]), p.kind, std::conj(p.center), p.radius);
    }
    for (std::size_t i = 0; i < arc_at; ++i) {
        const ContourPiece& p = upper[i];
        for (Complex s : p.pts) push(s, p.kind, p.center, p.radius);
    }
    if (arc_at < upper.size()) {
        const ContourPiece& arc = upper[arc_at];
        for (Complex s : arc.pts) push(s, arc.kind, arc.center, arc.radius);
        for (std::size_t k = arc.pts.size(); k-- > 0;)
            push(std::conj(arc.pts[k]), arc.kind, std::conj(arc.center), arc.radius);
    }

    // the mirrored arc ends where the curve started; the closing sample below
    // is the only place that point repeats
    while (samples.size() > 1 && samples.back().s == samples.front().s) samples.pop_back();

    const std::size_t m = samples.size();
    for (std::size_t i = 0; i < m; ++i) samples[i].t = static_cast<double>(i) / m;
    ContourSample closing = samples.front();
    closing.t = 1.0;
    samples.push_back(closing);
}

NyquistContour refine(const NyquistContour& contour, const FactoredTF& tf,
                      const ContourConfig& cfg_in) {
    ContourConfig cfg = resolve_config(tf, cfg_in);
    NyquistContour c = contour;
    const double bound = cfg.max_refine_angle_deg;

    auto midpoint = [](const ContourPiece& p, Complex a, Complex b) -> Complex {
        if (p.kind == SegmentKind::Axis) {
            double wa = a.imag(), wb = b.imag();
            if (wa > 0.0 && wb > 0.0) return Complex(0.0, std::sqrt(wa * wb));
            return Complex(0.0, 0.5 * (wa + wb));
        }
        double ta = std::atan2((a - p.center).imag(), (a - p.center).real());
        double tb = std::atan2((b - p.center).imag(), (b - p.center).real());
        return p.center + p.radius * std::exp(Complex(0.0, 0.5 * (ta + tb)));
    };

    std::vector<std::vector<Complex>> vals(c.upper.size());
    std::vector<std::vector<std::vector<Complex>>> fvals(c.upper.size());
    for (std::size_t i = 0; i < c.upper.size(); ++i) {
        const auto& pts = c.upper[i].pts;
        vals[i].reserve(pts.size());
        fvals[i].reserve(pts.size());
        for (Complex s : pts) {
            vals[i].push_back(eval_tf(tf, s));
            fvals[i].push_back(tf_factor_values(tf, s));
        }
    }

    auto pair_needs_split = [&](std::size_t piece, std::size_t k, double& worst) {
        Complex l0 = vals[piece][k], l1 = vals[piece][k + 1];
        double step = 0.0;
        if (std::abs(l0) > 1e-300 && std::abs(l1) > 1e-300)
            step = std::abs(principal_deg(l1 / l0));
        Complex m0 = l0 + 1.0, m1 = l1 + 1.0;
        if (std::abs(m0) > 1e-300 && std::abs(m1) > 1e-300)
            step = std::max(step, std::abs(principal_deg(m1 / m0)));
        worst = std::max(worst, step);
        if (step > bound) return true;
        // factor-level aliasing guard: a near-180 swing in any single factor
        // can hide behind cancellation in the product
        const auto& f0 = fvals[piece][k];
        const auto& f1 = fvals[piece][k + 1];
        for (std::size_t j = 0; j < f0.size(); ++j) {
            if (std::abs(f0[j]) <= 1e-300 || std::abs(f1[j]) <= 1e-300) continue;
            if (std::abs(principal_deg(f1[j] / f0[j])) >= 170.0) {
                worst = std::max(worst, 180.0);
                return true;
            }
        }
        return false;
    };

    for (;;) {
        std::size_t total = 0;
        for (const auto& p : c.upper) total += p.pts.size();
        bool changed = false;
        double worst = 0.0;

        for (std::size_t i = 0; i < c.upper.size(); ++i) {
            ContourPiece& p = c.upper[i];
            std::vector<Complex> npts, nvals;
            std::vector<std::vector<Complex>> nf;
            npts.reserve(p.pts.size() * 2);
            for (std::size_t k = 0; k + 1 < p.pts.size(); ++k) {
                npts.push_back(p.pts[k]);
                nvals.push_back(vals[i][k]);
                nf.push_back(fvals[i][k]);
                if (pair_needs_split(i, k, worst)) {
                    Complex ms = midpoint(p, p.pts[k], p.pts[k + 1]);
                    if (ms != p.pts[k] && ms != p.pts[k + 1]) {
                        npts.push_back(ms);
                        nvals.push_back(eval_tf(tf, ms));
                        nf.push_back(tf_factor_values(tf, ms));
                        changed = true;
                    }
                }
            }
            npts.push_back(p.pts.back());
            nvals.push_back(vals[i].back());
            nf.push_back(fvals[i].back());
            p.pts = std::move(npts);
            vals[i] = std::move(nvals);
            fvals[i] = std::move(nf);
        }

        std::size_t new_total = 0;
        for (const auto& p : c.upper) new_total += p.pts.size();

        if (!changed) {
            c.refinement_complete = true;
            break;
        }
        if (2 * new_total >= kSampleCap) {
            // budget exhausted; usable if every remaining step stays below a
            // quarter turn, otherwise the sampling cannot be trusted
            double remaining = 0.0;
            for (std::size_t i = 0; i < c.upper.size(); ++i)
                for (std::size_t k = 0; k + 1 < c.upper[i].pts.size(); ++k)
                    pair_needs_split(i, k, remaining);
            if (remaining <= 90.0) {
                c.refinement_complete = false;
                break;
            }
            throw RefinementBudgetError(
                "sample budget exhausted with mapped steps above 90 degrees");
        }
    }

    c.rebuild_samples();
    return c;
}

}  // namespace crossings
