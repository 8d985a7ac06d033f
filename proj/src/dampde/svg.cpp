#include "svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

#include "errors.hpp"

namespace dampde {

namespace {

struct Series {
    std::string name;
    std::string color;
    std::vector<std::array<double, 2>> points;  // (resolution, error)
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape_text(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

} // namespace

std::string emit_svg_loglog(const StudyReport& report, const SvgAxisConfig& axis) {
    const bool time_mode =
        report.mode == StudyMode::TimeRefine || report.mode == StudyMode::OcpTimeRefine;

    std::vector<Series> series = {
        {"err_phi", "#1f77b4", {}},
        {"err_d", "#d62728", {}},
        {"err_l", "#2ca02c", {}},
    };
    for (const StudyCell& c : report.cells) {
        if (!c.ok) {
            continue;
        }
        const double x = time_mode ? c.tau : c.h_over_sqrt2;
        const std::optional<double>* errs[3] = {&c.err_phi, &c.err_d, &c.err_l};
        for (int s = 0; s < 3; ++s) {
            if (errs[s]->has_value()) {
                const double y = errs[s]->value();
                if (!(y > 0.0) || !(x > 0.0)) {
                    throw ConfigError("log-log plot needs positive resolution and error values");
                }
                series[static_cast<std::size_t>(s)].points.push_back({x, y});
            }
        }
    }
    series.erase(std::remove_if(series.begin(), series.end(),
                                [](const Series& s) { return s.points.empty(); }),
                 series.end());
    if (series.empty()) {
        throw ConfigError("log-log plot needs at least one nonempty error series");
    }

    double lx_min = std::numeric_limits<double>::infinity();
    double lx_max = -std::numeric_limits<double>::infinity();
    double ly_min = std::numeric_limits<double>::infinity();
    double ly_max = -std::numeric_limits<double>::infinity();
    for (const Series& s : series) {
        for (const auto& p : s.points) {
            lx_min = std::min(lx_min, std::log10(p[0]));
            lx_max = std::max(lx_max, std::log10(p[0]));
            ly_min = std::min(ly_min, std::log10(p[1]));
            ly_max = std::max(ly_max, std::log10(p[1]));
        }
    }
    const auto pad = [](double& lo, double& hi) {
        const double span = hi - lo;
        const double margin = span > 0.0 ? 0.08 * span : 0.5;
        lo -= margin;
        hi += margin;
    };
    pad(lx_min, lx_max);
    pad(ly_min, ly_max);

    const double margin_l = 70.0;
    const double margin_r = 150.0;
    const double margin_t = 40.0;
    const double margin_b = 55.0;
    const double plot_w = axis.width - margin_l - margin_r;
    const double plot_h = axis.height - margin_t - margin_b;
    if (plot_w <= 0.0 || plot_h <= 0.0) {
        throw ConfigError("plot size leaves no drawing area");
    }

    // One scale for both axes so a slope-s series is a slope-s pixel line.
    const double scale = std::min(plot_w / (lx_max - lx_min), plot_h / (ly_max - ly_min));
    const double x0 = margin_l + 0.5 * (plot_w - scale * (lx_max - lx_min));
    const double y0 = margin_t + 0.5 * (plot_h - scale * (ly_max - ly_min));
    const auto px = [&](double x) { return x0 + scale * (std::log10(x) - lx_min); };
    const auto py = [&](double y) { return y0 + scale * (ly_max - std::log10(y)); };
    const double frame_x1 = x0;
    const double frame_x2 = x0 + scale * (lx_max - lx_min);
    const double frame_y1 = y0;
    const double frame_y2 = y0 + scale * (ly_max - ly_min);

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << axis.width
       << "\" height=\"" << axis.height << "\" viewBox=\"0 0 " << axis.width << " "
       << axis.height << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << axis.width << "\" height=\"" << axis.height
       << "\" fill=\"white\"/>\n";

    const std::string title =
        axis.title.empty() ? study_mode_name(report.mode) : axis.title;
    os << "<text x=\"" << num(0.5 * axis.width) << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"16\">"
       << escape_text(title) << "</text>\n";

    // Decade grid lines and tick labels.
    for (int e = static_cast<int>(std::ceil(lx_min)); e <= static_cast<int>(std::floor(lx_max));
         ++e) {
        const double x = px(std::pow(10.0, e));
        os << "<line x1=\"" << num(x) << "\" y1=\"" << num(frame_y1) << "\" x2=\"" << num(x)
           << "\" y2=\"" << num(frame_y2) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << num(x) << "\" y=\"" << num(frame_y2 + 18.0)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e" << e
           << "</text>\n";
    }
    for (int e = static_cast<int>(std::ceil(ly_min)); e <= static_cast<int>(std::floor(ly_max));
         ++e) {
        const double y = py(std::pow(10.0, e));
        os << "<line x1=\"" << num(frame_x1) << "\" y1=\"" << num(y) << "\" x2=\""
           << num(frame_x2) << "\" y2=\"" << num(y)
           << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << num(frame_x1 - 6.0) << "\" y=\"" << num(y + 4.0)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << e
           << "</text>\n";
    }
    os << "<rect x=\"" << num(frame_x1) << "\" y=\"" << num(frame_y1) << "\" width=\""
       << num(frame_x2 - frame_x1) << "\" height=\"" << num(frame_y2 - frame_y1)
       << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

    // Slope guides anchored below the first series' finest-resolution point.
    {
        const auto& pts = series.front().points;
        const auto anchor =
            *std::min_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
                return a[0] < b[0];
            });
        const double gx1 = std::pow(10.0, lx_min + 0.02 * (lx_max - lx_min));
        const double gx2 = std::pow(10.0, lx_max - 0.02 * (lx_max - lx_min));
        for (const double slope : {1.0, 2.0}) {
            const double ay = 0.6 * anchor[1];
            const auto guide_y = [&](double x) { return ay * std::pow(x / anchor[0], slope); };
            os << "<line x1=\"" << num(px(gx1)) << "\" y1=\"" << num(py(guide_y(gx1)))
               << "\" x2=\"" << num(px(gx2)) << "\" y2=\"" << num(py(guide_y(gx2)))
               << "\" stroke=\"#999999\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";
            os << "<text x=\"" << num(px(gx2) + 4.0) << "\" y=\"" << num(py(guide_y(gx2)))
               << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#777777\">slope "
               << num(slope) << "</text>\n";
        }
    }

    for (const Series& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            if (i > 0) {
                os << ' ';
            }
            os << num(px(s.points[i][0])) << ',' << num(py(s.points[i][1]));
        }
        os << "\"/>\n";
        for (const auto& p : s.points) {
            os << "<circle cx=\"" << num(px(p[0])) << "\" cy=\"" << num(py(p[1]))
               << "\" r=\"3.5\" fill=\"" << s.color << "\"/>\n";
        }
    }

    double legend_y = margin_t + 10.0;
    for (const Series& s : series) {
        const double lx = axis.width - margin_r + 16.0;
        os << "<line x1=\"" << num(lx) << "\" y1=\"" << num(legend_y - 4.0) << "\" x2=\""
           << num(lx + 24.0) << "\" y2=\"" << num(legend_y - 4.0) << "\" stroke=\"" << s.color
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << num(lx + 30.0) << "\" y=\"" << num(legend_y)
           << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape_text(s.name)
           << "</text>\n";
        legend_y += 18.0;
    }

    const std::string x_label =
        axis.x_label.empty() ? (time_mode ? std::string("tau") : std::string("h/sqrt(2)"))
                             : axis.x_label;
    os << "<text x=\"" << num(0.5 * (frame_x1 + frame_x2)) << "\" y=\""
       << num(axis.height - 12.0)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
       << escape_text(x_label) << "</text>\n";
    os << "<text x=\"18\" y=\"" << num(0.5 * (frame_y1 + frame_y2))
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
          "transform=\"rotate(-90 18 "
       << num(0.5 * (frame_y1 + frame_y2)) << ")\">" << escape_text(axis.y_label) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

} // namespace dampde
