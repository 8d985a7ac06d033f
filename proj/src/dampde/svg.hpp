#pragma once

#include <string>

#include "study.hpp"

namespace dampde {

struct SvgAxisConfig {
    int width = 720;
    int height = 540;
    std::string title;    // empty means the study mode name
    std::string x_label;  // empty means tau or h/sqrt(2) by study mode
    std::string y_label = "L2 error";
};

// Standalone SVG 1.1 document: log-log axes with equal per-decade scale, one
// marked polyline per populated error series, and dashed slope-1 and slope-2
// reference guides. Throws ConfigError when no positive data is available.
std::string emit_svg_loglog(const StudyReport& report, const SvgAxisConfig& axis = {});

} // namespace dampde
