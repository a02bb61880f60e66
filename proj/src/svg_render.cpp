#include "crossings/svg_render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace crossings {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string px(double v) {
    if (v == 0.0) v = 0.0;
    if (v > 1e6) v = 1e6;
    if (v < -1e6) v = -1e6;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string num(double v) {
    if (v == 0.0) v = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// 1-2-5 tick ladder covering [lo, hi] with about `target` steps
std::vector<double> ticks_125(double lo, double hi, int target) {
    std::vector<double> out;
    double span = hi - lo;
    if (!(span > 0.0) || !std::isfinite(span)) return out;
    double raw = span / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = 10.0 * mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 1e-9 * span; v += step) {
        if (std::abs(v) < 1e-12 * step) v = 0.0;
        out.push_back(v);
    }
    return out;
}

struct Frame {
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    double left = 56.0, right = 14.0, top = 14.0, bottom = 34.0;
    double width = 900.0, height = 700.0;

    double sx(double x) const {
        return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right);
    }
    double sy(double y) const {
        return height - bottom - (y - y_lo) / (y_hi - y_lo) * (height - top - bottom);
    }
    bool contains(double x, double y) const {
        return x >= x_lo && x <= x_hi && y >= y_lo && y <= y_hi;
    }
};

std::string svg_open(const Frame& f) {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      px(f.width) + "\" height=\"" + px(f.height) + "\" viewBox=\"0 0 " +
                      px(f.width) + " " + px(f.height) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + px(f.width) + "\" height=\"" + px(f.height) +
           "\" fill=\"#ffffff\"/>\n";
    out += "<clipPath id=\"plot\"><rect x=\"" + px(f.left) + "\" y=\"" + px(f.top) +
           "\" width=\"" + px(f.width - f.left - f.right) + "\" height=\"" +
           px(f.height - f.top - f.bottom) + "\"/></clipPath>\n";
    return out;
}

std::string grid_and_ticks(const Frame& f) {
    std::string out;
    out += "<rect x=\"" + px(f.left) + "\" y=\"" + px(f.top) + "\" width=\"" +
           px(f.width - f.left - f.right) + "\" height=\"" +
           px(f.height - f.top - f.bottom) + "\" fill=\"none\" stroke=\"#999999\"/>\n";
    for (double v : ticks_125(f.x_lo, f.x_hi, 8)) {
        double x = f.sx(v);
        out += "<line x1=\"" + px(x) + "\" y1=\"" + px(f.top) + "\" x2=\"" + px(x) +
               "\" y2=\"" + px(f.height - f.bottom) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + px(x) + "\" y=\"" + px(f.height - f.bottom + 16.0) +
               "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#444444\">" + num(v) +
               "</text>\n";
    }
    for (double v : ticks_125(f.y_lo, f.y_hi, 8)) {
        double y = f.sy(v);
        out += "<line x1=\"" + px(f.left) + "\" y1=\"" + px(y) + "\" x2=\"" +
               px(f.width - f.right) + "\" y2=\"" + px(y) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + px(f.left - 6.0) + "\" y=\"" + px(y + 4.0) +
               "\" font-size=\"11\" text-anchor=\"end\" fill=\"#444444\">" + num(v) +
               "</text>\n";
    }
    return out;
}

std::string polyline(const Frame& f, const std::vector<std::pair<double, double>>& pts,
                     const char* color) {
    std::string out;
    std::string d;
    bool pen_down = false;
    for (const auto& [x, y] : pts) {
        if (!std::isfinite(x) || !std::isfinite(y)) {
            pen_down = false;
            continue;
        }
        d += pen_down ? "L" : "M";
        d += px(f.sx(x)) + " " + px(f.sy(y));
        pen_down = true;
    }
    if (!d.empty())
        out += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.5\" clip-path=\"url(#plot)\"/>\n";
    return out;
}

std::string crossing_marker(const Frame& f, double x, double y, int sign) {
    const char* color = sign > 0 ? "#2ca02c" : "#ff7f0e";
    std::string out = "<circle cx=\"" + px(f.sx(x)) + "\" cy=\"" + px(f.sy(y)) +
                      "\" r=\"5\" fill=\"none\" stroke=\"" + color +
                      "\" stroke-width=\"2\" clip-path=\"url(#plot)\"/>\n";
    out += "<text x=\"" + px(f.sx(x) + 8.0) + "\" y=\"" + px(f.sy(y) - 8.0) +
           "\" font-size=\"12\" fill=\"" + color + "\">" + (sign > 0 ? "+1" : "-1") +
           "</text>\n";
    return out;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 1.0;
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

double nearest_ray_deg(double phase) {
    double k = std::round((-180.0 - phase) / 360.0);
    return -180.0 - 360.0 * k;
}

}  // namespace

std::string render_nyquist_svg(const MappedCurve& curve, const std::vector<Crossing>& crossings,
                               const PlotOptions& opts) {
    Frame f;
    f.width = opts.width;
    f.height = opts.height;

    std::vector<double> mags;
    mags.reserve(curve.points.size());
    for (const auto& p : curve.points)
        if (std::isfinite(std::abs(p.value))) mags.push_back(std::abs(p.value));
    double cap = std::max({3.0, 10.0 * median_of(mags)});
    for (const auto& c : crossings)
        if (std::isfinite(c.location)) cap = std::max(cap, 1.5 * std::abs(c.location));

    double x_lo = -1.5, x_hi = 0.5, y_lo = -1.0, y_hi = 1.0;
    for (const auto& p : curve.points) {
        if (std::abs(p.value) > cap) continue;
        x_lo = std::min(x_lo, p.value.real());
        x_hi = std::max(x_hi, p.value.real());
        y_lo = std::min(y_lo, p.value.imag());
        y_hi = std::max(y_hi, p.value.imag());
    }
    // equal aspect around the data box
    double cx = 0.5 * (x_lo + x_hi), cy = 0.5 * (y_lo + y_hi);
    double plot_w = f.width - f.left - f.right, plot_h = f.height - f.top - f.bottom;
    double unit = std::max((x_hi - x_lo) * 1.12 / plot_w, (y_hi - y_lo) * 1.12 / plot_h);
    f.x_lo = cx - 0.5 * plot_w * unit;
    f.x_hi = cx + 0.5 * plot_w * unit;
    f.y_lo = cy - 0.5 * plot_h * unit;
    f.y_hi = cy + 0.5 * plot_h * unit;

    std::string out = svg_open(f);
    out += grid_and_ticks(f);
    if (f.contains(0.0, 0.0)) {
        out += "<line x1=\"" + px(f.sx(0.0)) + "\" y1=\"" + px(f.top) + "\" x2=\"" +
               px(f.sx(0.0)) + "\" y2=\"" + px(f.height - f.bottom) +
               "\" stroke=\"#999999\"/>\n";
    }
    if (f.y_lo < 0.0 && f.y_hi > 0.0) {
        out += "<line x1=\"" + px(f.left) + "\" y1=\"" + px(f.sy(0.0)) + "\" x2=\"" +
               px(f.width - f.right) + "\" y2=\"" + px(f.sy(0.0)) +
               "\" stroke=\"#999999\"/>\n";
        // the ray from -1 out to the left edge
        out += "<line x1=\"" + px(f.left) + "\" y1=\"" + px(f.sy(0.0)) + "\" x2=\"" +
               px(f.sx(-1.0)) + "\" y2=\"" + px(f.sy(0.0)) +
               "\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>\n";
    }
    // critical point
    out += "<circle cx=\"" + px(f.sx(-1.0)) + "\" cy=\"" + px(f.sy(0.0)) +
           "\" r=\"4\" fill=\"#d62728\"/>\n";
    out += "<text x=\"" + px(f.sx(-1.0) + 6.0) + "\" y=\"" + px(f.sy(0.0) + 14.0) +
           "\" font-size=\"11\" fill=\"#d62728\">-1</text>\n";

    std::vector<std::pair<double, double>> pts;
    pts.reserve(curve.points.size());
    for (const auto& p : curve.points) {
        if (std::abs(p.value) > 3.0 * cap) {
            pts.emplace_back(std::numeric_limits<double>::quiet_NaN(), 0.0);  // pen up
            continue;
        }
        pts.emplace_back(p.value.real(), p.value.imag());
    }
    out += polyline(f, pts, "#1f77b4");

    for (const auto& c : crossings) out += crossing_marker(f, c.location, 0.0, c.sign);
    out += "</svg>\n";
    return out;
}

std::string render_nichols_svg(const NicholsCurve& curve, const std::vector<Crossing>& crossings,
                               const PlotOptions& opts) {
    Frame f;
    f.width = opts.width;
    f.height = opts.height;

    double x_lo = -360.0, x_hi = 0.0, y_lo = -40.0, y_hi = 20.0;
    bool first = true;
    for (const auto& p : curve.points) {
        if (!std::isfinite(p.phase_deg) || !std::isfinite(p.mag_db)) continue;
        double m = std::clamp(p.mag_db, -120.0, 120.0);
        if (first) {
            x_lo = x_hi = p.phase_deg;
            y_lo = y_hi = m;
            first = false;
        } else {
            x_lo = std::min(x_lo, p.phase_deg);
            x_hi = std::max(x_hi, p.phase_deg);
            y_lo = std::min(y_lo, m);
            y_hi = std::max(y_hi, m);
        }
    }
    y_lo = std::min(y_lo, -10.0);
    y_hi = std::max(y_hi, 10.0);
    x_lo = std::min(x_lo, -200.0);
    x_hi = std::max(x_hi, -160.0);
    double mx = 0.06 * (x_hi - x_lo), my = 0.06 * (y_hi - y_lo);
    f.x_lo = x_lo - mx;
    f.x_hi = x_hi + mx;
    f.y_lo = y_lo - my;
    f.y_hi = y_hi + my;

    std::string out = svg_open(f);
    out += grid_and_ticks(f);

    // 0 dB line
    if (f.y_lo < 0.0 && f.y_hi > 0.0)
        out += "<line x1=\"" + px(f.left) + "\" y1=\"" + px(f.sy(0.0)) + "\" x2=\"" +
               px(f.width - f.right) + "\" y2=\"" + px(f.sy(0.0)) +
               "\" stroke=\"#999999\"/>\n";

    // critical rays: phase = -180 - 360k, magnitude above 0 dB
    int k_lo = static_cast<int>(std::ceil((-180.0 - f.x_hi) / 360.0));
    int k_hi = static_cast<int>(std::floor((-180.0 - f.x_lo) / 360.0));
    for (int k = k_lo; k <= k_hi; ++k) {
        double rho = -180.0 - 360.0 * k;
        double y_from = std::max(0.0, f.y_lo);
        out += "<line x1=\"" + px(f.sx(rho)) + "\" y1=\"" + px(f.sy(f.y_hi)) + "\" x2=\"" +
               px(f.sx(rho)) + "\" y2=\"" + px(f.sy(y_from)) +
               "\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>\n";
        if (f.y_lo < 0.0)
            out += "<circle cx=\"" + px(f.sx(rho)) + "\" cy=\"" + px(f.sy(0.0)) +
                   "\" r=\"4\" fill=\"#d62728\"/>\n";
        out += "<text x=\"" + px(f.sx(rho) + 5.0) + "\" y=\"" + px(f.top + 14.0) +
               "\" font-size=\"11\" fill=\"#d62728\">" + num(rho) + "</text>\n";
    }

    std::vector<std::pair<double, double>> pts;
    pts.reserve(curve.points.size());
    double prev_phase = 0.0;
    bool have_prev = false;
    for (const auto& p : curve.points) {
        bool finite = std::isfinite(p.phase_deg) && std::isfinite(p.mag_db) &&
                      std::abs(p.mag_db) <= 200.0;
        bool seam = have_prev && std::abs(p.phase_deg - prev_phase) > 180.0;
        if (!finite || seam)
            pts.emplace_back(std::numeric_limits<double>::quiet_NaN(), 0.0);  // pen up
        if (finite) {
            pts.emplace_back(p.phase_deg, p.mag_db);
            prev_phase = p.phase_deg;
            have_prev = true;
        }
    }
    out += polyline(f, pts, "#1f77b4");

    // a crossing sits on the ray nearest the curve phase at its parameter
    for (const auto& c : crossings) {
        double phase = -180.0;
        double best = 1e300;
        for (const auto& p : curve.points) {
            double d = std::abs(p.t - c.t);
            if (d < best) {
                best = d;
                phase = curve.mode == NicholsMode::Single
                            ? -180.0
                            : nearest_ray_deg(
                                  curve.continuous_phase_deg[&p - curve.points.data()]);
            }
        }
        out += crossing_marker(f, phase, c.location, c.sign);
    }
    out += "</svg>\n";
    return out;
}

}  // namespace crossings
