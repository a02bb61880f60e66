#pragma once

#include <optional>
#include <vector>

#include "crossings/contour.hpp"

namespace crossings {

struct CurvePoint {
    double t = 0.0;
    std::optional<double> omega;  // Im(s) on axis samples, empty on indent/arc
    Complex value{0.0, 0.0};
    double mag_db = 0.0;
    double phase_deg = 0.0;  // continuous multiple-sheeted phase along t
    SegmentKind segment = SegmentKind::Axis;
};

struct MappedCurve {
    std::vector<CurvePoint> points;
};

enum class CrossingKind { Regular, CuspZero, CuspInfinity };
enum class ChartKind { ComplexPlane, NicholsSingle, NicholsMulti };

struct Crossing {
    double t = 0.0;
    std::optional<double> omega;
    double location = 0.0;  // real-axis value (< -1) or dB value (> 0)
    int sign = 0;           // +1 or -1
    CrossingKind kind = CrossingKind::Regular;
    ChartKind chart = ChartKind::ComplexPlane;
};

// Maps the contour through L(s). Magnitude comes from summed factor
// log-magnitudes; the phase is accumulated per factor along the traversal
// (numerator +, denominator -, integrator via arg s), anchored at the sample
// on the nonnegative real axis where each factor takes its principal value.
// Throws PoleProximityError when a denominator factor value drops below
// 1e-300 in magnitude.
MappedCurve map_response(const FactoredTF& tf, const NyquistContour& contour);

struct DetectOptions {
    // Base half-width of the critical-point band; the effective band at a
    // candidate location x is tol_scale * (1 + |x|).
    double tol_scale = 1e-8;
    // Test hook: with the cusp handler off, on-ray events at omega = 0 and at
    // infinity are silently dropped.
    bool enable_cusp_handling = true;
};

// Signed intersections of the mapped curve with the ray (-inf, -1): an Im
// sign change between consecutive samples with interpolated Re < -1, refined
// by bisection; sign +1 when Im increases through zero (the plot moves
// upward). On-ray events at omega = 0, on the origin indent, and at infinity
// are resolved by the cusp rules. Throws CriticalPointHitError when a
// crossing lands inside the critical band around -1.
std::vector<Crossing> detect_ray_crossings(const MappedCurve& curve, const FactoredTF& tf,
                                           const NyquistContour& contour,
                                           const DetectOptions& opts = {});

enum class CuspAt { Zero, Infinity };

// Sign of an on-ray event at omega = 0 (or at infinity via the 1/omega
// substitution): +1 when the plot leaves the real axis upward, -1 downward,
// 0 when the event does not apply or the response is flat to the noise floor.
int cusp_sign(const FactoredTF& tf, CuspAt at);

// Net clockwise encirclements of -1: the accumulated phase change of
// value + 1 over the closed traversal divided by -360 degrees. Throws
// CriticalPointHitError if any sample lies within the critical band.
int winding_number(const MappedCurve& curve, double tol_scale = 1e-8);

inline int crossing_sum(const std::vector<Crossing>& crossings) {
    int n = 0;
    for (const auto& c : crossings) n += c.sign;
    return n;
}

}  // namespace crossings
