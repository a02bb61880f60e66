#include "crossings/nichols.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crossings/errors.hpp"

namespace crossings {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Accumulated float error in the continuous phase stays far below this, so a
// sample this close to a ray is treated as sitting on it.
constexpr double kRaySnapDeg = 1e-6;

double principal_deg(Complex q) { return std::arg(q) * 180.0 / kPi; }

double nearest_ray(double phase_deg) {
    double k = std::round((-180.0 - phase_deg) / 360.0);
    return -180.0 - 360.0 * k;
}

double biproper_limit(const FactoredTF& tf) {
    double num = tf.gain, den = 1.0;
    for (const auto& f : tf.zero_factors) num *= f.leading();
    for (const auto& f : tf.pole_factors) den *= f.leading();
    return num / den;
}

}  // namespace

NicholsCurve to_nichols(const MappedCurve& curve, NicholsMode mode) {
    NicholsCurve out;
    out.mode = mode;
    out.points.reserve(curve.points.size());
    out.continuous_phase_deg.reserve(curve.points.size());
    for (const auto& p : curve.points) {
        NicholsPoint np;
        np.t = p.t;
        np.omega = p.omega;
        np.mag_db = p.mag_db;
        np.segment = p.segment;
        np.phase_deg =
            mode == NicholsMode::Single ? wrap_phase_single(p.phase_deg) : p.phase_deg;
        out.points.push_back(np);
        out.continuous_phase_deg.push_back(p.phase_deg);
    }
    return out;
}

std::vector<Crossing> detect_nichols_crossings(const NicholsCurve& curve, const FactoredTF& tf,
                                               const NyquistContour& contour,
                                               const NicholsDetectOptions& opts) {
    const auto& np = curve.points;
    const auto& phi = curve.continuous_phase_deg;
    if (np.size() < 3) return {};
    if (np.size() != contour.samples.size())
        throw std::invalid_argument("curve and contour sample counts differ");
    const std::size_t m = np.size() - 1;
    const int rd = tf.relative_degree();
    const ChartKind chart =
        curve.mode == NicholsMode::Single ? ChartKind::NicholsSingle : ChartKind::NicholsMulti;

    std::vector<Crossing> out;
    auto lin_in_band = [&](double lin) {
        return std::abs(lin - 1.0) <= opts.tol_scale * (1.0 + lin);
    };
    auto push = [&](Crossing c) {
        c.chart = chart;
        out.push_back(c);
    };

    // passages between samples
    for (std::size_t i = 0; i < m; ++i) {
        if (rd == 0 && (np[i].segment == SegmentKind::Arc ||
                        np[i + 1].segment == SegmentKind::Arc))
            continue;  // flat limit region; handled as one event below
        double lo = std::min(phi[i], phi[i + 1]) + kRaySnapDeg;
        double hi = std::max(phi[i], phi[i + 1]) - kRaySnapDeg;
        if (!(lo < hi)) continue;
        int kmin = static_cast<int>(std::ceil((-180.0 - hi) / 360.0));
        int kmax = static_cast<int>(std::floor((-180.0 - lo) / 360.0));
        for (int k = kmin; k <= kmax; ++k) {
            double rho = -180.0 - 360.0 * k;
            if (!(rho > lo && rho < hi)) continue;

            Complex slo = contour.samples[i].s, shi = contour.samples[i + 1].s;
            Complex vlo = eval_tf(tf, slo), vhi = eval_tf(tf, shi);
            double plo = phi[i], phi_hi = phi[i + 1];
            for (int it = 0; it < 80; ++it) {
                Complex sm = contour_pair_midpoint(contour.samples[i], contour.samples[i + 1],
                                                   slo, shi);
                if (sm == slo || sm == shi) break;
                Complex vm = eval_tf(tf, sm);
                if (!std::isfinite(vm.real()) || !std::isfinite(vm.imag())) break;
                double pm = plo + principal_deg(vm / vlo);
                if ((pm < rho) == (plo < rho)) {
                    slo = sm;
                    vlo = vm;
                    plo = pm;
                } else {
                    shi = sm;
                    vhi = vm;
                    phi_hi = pm;
                }
                if (std::abs(shi - slo) <= 1e-14 * (1.0 + std::abs(slo))) break;
            }
            double lin;
            if (phi_hi == plo)
                lin = 0.5 * (std::abs(vlo) + std::abs(vhi));
            else
                lin = std::abs(vlo) + (std::abs(vhi) - std::abs(vlo)) * (rho - plo) /
                                          (phi_hi - plo);
            if (lin_in_band(lin))
                throw CriticalPointHitError(np[i].t,
                                            "chart crossing lands inside the critical band "
                                            "around 0 dB");
            double mag_db = 20.0 * std::log10(lin);
            if (!(mag_db > opts.db_floor)) continue;

            Crossing c;
            c.t = 0.5 * (np[i].t + np[i + 1].t);
            c.location = mag_db;
            c.sign = phi[i + 1] < phi[i] ? +1 : -1;  // leftward = positive
            c.kind = CrossingKind::Regular;
            if (np[i].segment == SegmentKind::Axis && np[i + 1].segment == SegmentKind::Axis)
                c.omega = 0.5 * (slo + shi).imag();
            else if (contour.samples[i].segment == SegmentKind::Indent ||
                     contour.samples[i + 1].segment == SegmentKind::Indent) {
                Complex ctr = contour.samples[i].segment == SegmentKind::Indent
                                  ? contour.samples[i].center
                                  : contour.samples[i + 1].center;
                c.omega = std::abs(ctr) <= contour.indent_radius ? 0.0 : ctr.imag();
            }
            push(c);
        }
    }

    // samples that land exactly on a ray
    for (std::size_t i = 0; i < m; ++i) {
        double rho = nearest_ray(phi[i]);
        if (std::abs(phi[i] - rho) > kRaySnapDeg) continue;
        Complex s = contour.samples[i].s;
        double lin = std::abs(eval_tf(tf, s));
        if (lin_in_band(lin))
            throw CriticalPointHitError(np[i].t,
                                        "chart sample lies inside the critical band around "
                                        "0 dB");
        if (!(np[i].mag_db > opts.db_floor)) continue;

        bool s_real = s.imag() == 0.0;
        bool at_origin = s_real && s.real() == 0.0;
        bool at_infinity = s_real && np[i].segment == SegmentKind::Arc;
        bool on_origin_indent = s_real && np[i].segment == SegmentKind::Indent &&
                                std::abs(s) <= 2.0 * contour.indent_radius;
        if (!opts.enable_cusp_handling && s_real) continue;

        if (at_origin) {
            int sign = cusp_sign(tf, CuspAt::Zero);
            if (sign == 0) continue;
            Crossing c;
            c.t = np[i].t;
            c.omega = 0.0;
            c.location = np[i].mag_db;
            c.sign = sign;
            c.kind = CrossingKind::CuspZero;
            push(c);
            continue;
        }
        // At relative degree zero the whole arc hovers next to the finite
        // limit; every arc sample can sit inside the ray snap, so the single
        // limit event below stands in for all of them.
        if (rd == 0 && np[i].segment == SegmentKind::Arc) continue;

        // passage direction from the first neighbors clearly off the ray
        double before = 0.0, after = 0.0;
        bool have_before = false, have_after = false;
        for (int step = 1; step <= 8 && !have_before; ++step) {
            long j = (static_cast<long>(i) - step) % static_cast<long>(m);
            if (j < 0) j += static_cast<long>(m);
            double d = phi[static_cast<std::size_t>(j)] - rho;
            if (std::abs(d) > kRaySnapDeg) {
                before = d;
                have_before = true;
            }
        }
        for (int step = 1; step <= 8 && !have_after; ++step) {
            std::size_t j = (i + static_cast<std::size_t>(step)) % m;
            double d = phi[j] - rho;
            if (std::abs(d) > kRaySnapDeg) {
                after = d;
                have_after = true;
            }
        }
        if (!have_before || !have_after) continue;
        if (before * after >= 0.0) continue;  // reflection off the ray, no passage
        Crossing c;
        c.t = np[i].t;
        c.location = np[i].mag_db;
        c.sign = after < 0.0 ? +1 : -1;
        c.kind = at_infinity ? CrossingKind::CuspInfinity : CrossingKind::Regular;
        if (on_origin_indent)
            c.omega = 0.0;
        else if (np[i].segment == SegmentKind::Axis)
            c.omega = s.imag();
        push(c);
    }

    // biproper limit sitting on a ray
    if (rd == 0 && opts.enable_cusp_handling) {
        double c_lim = biproper_limit(tf);
        if (c_lim < 0.0) {
            double lin = -c_lim;
            double t_arc = 1.0;
            for (std::size_t i = 0; i < m; ++i)
                if (np[i].segment == SegmentKind::Arc) {
                    t_arc = np[i].t;
                    break;
                }
            if (lin_in_band(lin))
                throw CriticalPointHitError(t_arc,
                                            "high-frequency limit lies inside the critical "
                                            "band around 0 dB");
            if (lin > 1.0) {
                int sign = cusp_sign(tf, CuspAt::Infinity);
                if (sign != 0) {
                    Crossing c;
                    c.location = 20.0 * std::log10(lin);
                    c.sign = sign;
                    c.kind = CrossingKind::CuspInfinity;
                    c.t = t_arc;
                    for (std::size_t i = 0; i < m; ++i)
                        if (np[i].segment == SegmentKind::Arc &&
                            contour.samples[i].s.imag() == 0.0) {
                            c.t = np[i].t;
                            break;
                        }
                    push(c);
                }
            }
        }
    }

    std::sort(out.begin(), out.end(),
              [](const Crossing& a, const Crossing& b) { return a.t < b.t; });
    return out;
}

std::optional<double> critical_point_check(const NicholsCurve& curve, double tol_deg,
                                           double tol_db) {
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        double rho = nearest_ray(curve.continuous_phase_deg[i]);
        if (std::abs(curve.continuous_phase_deg[i] - rho) <= tol_deg &&
            std::abs(curve.points[i].mag_db) <= tol_db)
            return curve.points[i].t;
    }
    return std::nullopt;
}

}  // namespace crossings
