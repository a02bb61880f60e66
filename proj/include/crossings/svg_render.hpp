#pragma once

#include <string>
#include <vector>

#include "crossings/nichols.hpp"

namespace crossings {

struct PlotOptions {
    int width = 900;
    int height = 700;
};

// Complex-plane plot: curve, the ray (-inf, -1), the critical point, and the
// detected crossings annotated with their sign. Output is deterministic.
std::string render_nyquist_svg(const MappedCurve& curve, const std::vector<Crossing>& crossings,
                               const PlotOptions& opts = {});

// Nichols plot (single or multiple sheet per curve.mode): critical rays at
// -180 - 360k degrees above 0 dB for every sheet the curve spans, critical
// points marked, crossings annotated with their sign.
std::string render_nichols_svg(const NicholsCurve& curve, const std::vector<Crossing>& crossings,
                               const PlotOptions& opts = {});

}  // namespace crossings
