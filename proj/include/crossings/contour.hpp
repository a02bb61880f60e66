#pragma once

#include <vector>

#include "crossings/transfer_function.hpp"

namespace crossings {

enum class SegmentKind { Axis, Indent, Arc };

struct ContourSample {
    Complex s;
    double t = 0.0;  // strictly increasing along the traversal, in [0,1)
    SegmentKind segment = SegmentKind::Axis;
    Complex center{0.0, 0.0};  // indent center (Indent), origin (Arc)
    double radius = 0.0;       // indent radius or big radius; unused on Axis
};

struct ContourConfig {
    double big_radius = 0.0;         // 0 = derive from pole/zero magnitudes
    double indent_radius = 0.0;      // 0 = derive from imaginary-axis spacing
    int min_samples_per_decade = 64;
    double max_refine_angle_deg = 5.0;  // must be in (0, 45]
};

// One monotone piece of the upper half-path: either an axis run (pts ordered
// by increasing Im(s)), an indent semicircle (ordered by increasing angle
// about its center), or the quarter-ish arc (ordered from +jR toward +R).
struct ContourPiece {
    SegmentKind kind = SegmentKind::Axis;
    Complex center{0.0, 0.0};
    double radius = 0.0;
    std::vector<Complex> pts;
};

// Clockwise Nyquist contour: up the imaginary axis from -jR to +jR with
// rightward semicircular indents around imaginary-axis poles (and zeros, which
// are detoured too so the mapped phase stays finite), then the clockwise arc
// of radius R back to -jR. Samples are exactly conjugate-symmetric: the lower
// half is assembled by mirroring the stored upper-half pieces.
struct NyquistContour {
    std::vector<ContourSample> samples;        // full closed traversal, last == first point
    std::vector<Complex> detoured_poles;       // imaginary-axis pole locations
    std::vector<Complex> detoured_zeros;       // imaginary-axis zero locations
    double big_radius = 0.0;
    double indent_radius = 0.0;
    bool refinement_complete = true;           // false if refine hit the sample budget

    // Upper-half geometry, ordered from the positive real axis start (s = 0 or
    // s = indent_radius) to s = big_radius along the arc. Kept so refine() can
    // insert geometric midpoints and rebuild the mirror half exactly.
    std::vector<ContourPiece> upper;

    void rebuild_samples();
};

// Fills the zero (auto) fields of cfg from the TF's pole/zero geometry.
ContourConfig resolve_config(const FactoredTF& tf, ContourConfig cfg);

// Throws IndentTooLargeError / RadiusTooSmallError when an explicit config
// violates the geometry, std::invalid_argument on nonsensical settings.
NyquistContour build_contour(const FactoredTF& tf, const ContourConfig& cfg = {});

// Midpoint of the contour stretch between two adjacent samples, following the
// piece geometry (log-frequency on axis runs, angle on indents and the arc).
// lo/hi may be an already-narrowed bracket inside the pair.
Complex contour_pair_midpoint(const ContourSample& a, const ContourSample& b, Complex lo,
                              Complex hi);

// Inserts geometric midpoints until consecutive mapped points differ by at
// most cfg.max_refine_angle_deg in loop phase (and in phase of L+1, which the
// winding computation needs), capped at 2^20 samples. If the cap is reached
// while steps remain below 90 deg the partially refined contour is returned
// with refinement_complete = false; beyond that RefinementBudgetError is
// thrown.
NyquistContour refine(const NyquistContour& contour, const FactoredTF& tf,
                      const ContourConfig& cfg);

}  // namespace crossings
