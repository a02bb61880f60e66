#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "crossings/frequency_response.hpp"

namespace crossings {

enum class NicholsMode { Single, Multiple };

struct NicholsPoint {
    double t = 0.0;
    std::optional<double> omega;
    double phase_deg = 0.0;  // wrapped to [-360, 0) in Single mode
    double mag_db = 0.0;
    SegmentKind segment = SegmentKind::Axis;
};

struct NicholsCurve {
    std::vector<NicholsPoint> points;
    NicholsMode mode = NicholsMode::Single;
    // Unwrapped phase per point, retained because crossing detection always
    // runs on the continuous phase and only the reported chart differs.
    std::vector<double> continuous_phase_deg;
};

// Wraps phase into [-360, 0) in Single mode (so -360 stays at the left edge
// and 0 wraps onto it); Multiple mode keeps the continuous phase.
NicholsCurve to_nichols(const MappedCurve& curve, NicholsMode mode);

inline double wrap_phase_single(double phase_deg) {
    return phase_deg - 360.0 * std::floor((phase_deg + 360.0) / 360.0);
}

// Signed crossings of the critical rays (phase = -180 - 360k, magnitude above
// 0 dB): continuous-phase passages through any ray value spanned by the
// curve, with magnitude above db_floor; sign +1 when the phase decreases
// through the ray (the curve moves leftward). Throws CriticalPointHitError
// when a crossing lands within the critical band of 0 dB.
struct NicholsDetectOptions {
    double db_floor = 1e-9;   // crossings need mag_db strictly above this
    double tol_scale = 1e-8;  // critical band half-width, in linear gain terms
    bool enable_cusp_handling = true;
};

std::vector<Crossing> detect_nichols_crossings(const NicholsCurve& curve, const FactoredTF& tf,
                                               const NyquistContour& contour,
                                               const NicholsDetectOptions& opts = {});

// First curve point inside the (tol_deg, tol_db) box around a critical point
// (-180 - 360k degrees, 0 dB), or empty.
std::optional<double> critical_point_check(const NicholsCurve& curve, double tol_deg,
                                           double tol_db);

}  // namespace crossings
