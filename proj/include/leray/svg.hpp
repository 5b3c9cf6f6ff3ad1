#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "leray/diagnostics.hpp"
#include "leray/scaling.hpp"

namespace leray {
namespace detail {

inline std::string fmt_fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

inline std::string fmt_compact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

struct LogAxis {
    double lo = 0.0, hi = 1.0; // log10 range
    double pix0 = 0.0, pix1 = 1.0;
    bool flip = false; // y axes grow downward in SVG

    double map(double value) const {
        double f = (std::log10(value) - lo) / (hi - lo);
        if (flip) f = 1.0 - f;
        return pix0 + f * (pix1 - pix0);
    }
};

inline void expand_log_range(double value, double& lo, double& hi) {
    double l = std::log10(value);
    lo = std::min(lo, l);
    hi = std::max(hi, l);
}

} // namespace detail

/// Log-log scatter of (Re, tau_trans) with the fitted power law overlaid
/// and its slope annotated. Rows without a transition are skipped. The
/// timestamp comment is omitted when the string is empty, so reruns can be
/// compared byte for byte.
inline std::string svg_powerlaw_plot(const std::vector<SweepRow>& rows,
                                     const std::optional<FitResult>& fit,
                                     const std::string& timestamp = "") {
    const int width = 640, height = 480;
    const double ml = 70, mr = 25, mt = 40, mb = 55;

    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    size_t n_hits = 0;
    for (const SweepRow& r : rows) {
        if (!r.hit || !r.tau_trans || !(*r.tau_trans > 0.0)) continue;
        detail::expand_log_range(r.re, xlo, xhi);
        detail::expand_log_range(*r.tau_trans, ylo, yhi);
        ++n_hits;
    }
    if (n_hits == 0) {
        xlo = 0.0;
        xhi = 1.0;
        ylo = 0.0;
        yhi = 1.0;
    }
    if (xhi - xlo < 1e-12) {
        xlo -= 0.5;
        xhi += 0.5;
    }
    if (yhi - ylo < 1e-12) {
        ylo -= 0.5;
        yhi += 0.5;
    }
    double xpad = 0.05 * (xhi - xlo), ypad = 0.08 * (yhi - ylo);
    detail::LogAxis ax{xlo - xpad, xhi + xpad, ml, width - mr, false};
    detail::LogAxis ay{ylo - ypad, yhi + ypad, mt, height - mb, true};

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
         " " + std::to_string(height) + "\">\n";
    if (!timestamp.empty()) s += "<!-- generated " + timestamp + " -->\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + std::to_string(width / 2) +
         "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">"
         "Transition time vs Reynolds number</text>\n";

    // Decade gridlines and tick labels.
    for (int d = static_cast<int>(std::floor(ax.lo)); d <= static_cast<int>(std::ceil(ax.hi));
         ++d) {
        double v = std::pow(10.0, d);
        if (std::log10(v) < ax.lo || std::log10(v) > ax.hi) continue;
        double px = ax.map(v);
        s += "<line x1=\"" + detail::fmt_fixed(px) + "\" y1=\"" + detail::fmt_fixed(mt) +
             "\" x2=\"" + detail::fmt_fixed(px) + "\" y2=\"" + detail::fmt_fixed(height - mb) +
             "\" stroke=\"#dddddd\"/>\n";
        s += "<text x=\"" + detail::fmt_fixed(px) + "\" y=\"" + detail::fmt_fixed(height - mb + 18) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
             detail::fmt_compact(v) + "</text>\n";
    }
    for (int d = static_cast<int>(std::floor(ay.lo)); d <= static_cast<int>(std::ceil(ay.hi));
         ++d) {
        double v = std::pow(10.0, d);
        if (std::log10(v) < ay.lo || std::log10(v) > ay.hi) continue;
        double py = ay.map(v);
        s += "<line x1=\"" + detail::fmt_fixed(ml) + "\" y1=\"" + detail::fmt_fixed(py) +
             "\" x2=\"" + detail::fmt_fixed(width - mr) + "\" y2=\"" + detail::fmt_fixed(py) +
             "\" stroke=\"#dddddd\"/>\n";
        s += "<text x=\"" + detail::fmt_fixed(ml - 8) + "\" y=\"" + detail::fmt_fixed(py + 4) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
             detail::fmt_compact(v) + "</text>\n";
    }
    // Frame and axis titles.
    s += "<rect x=\"" + detail::fmt_fixed(ml) + "\" y=\"" + detail::fmt_fixed(mt) + "\" width=\"" +
         detail::fmt_fixed(width - ml - mr) + "\" height=\"" + detail::fmt_fixed(height - mt - mb) +
         "\" fill=\"none\" stroke=\"#333333\"/>\n";
    s += "<text x=\"" + std::to_string(width / 2) + "\" y=\"" + std::to_string(height - 14) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">Re</text>\n";
    s += "<text x=\"18\" y=\"" + std::to_string(height / 2) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 18 " +
         std::to_string(height / 2) + ")\">tau_trans</text>\n";

    // Fitted line across the plotted range.
    if (fit) {
        double re0 = std::pow(10.0, ax.lo), re1 = std::pow(10.0, ax.hi);
        double tau0 = fit->prefactor_k1 * std::pow(re0, fit->exponent);
        double tau1 = fit->prefactor_k1 * std::pow(re1, fit->exponent);
        s += "<line x1=\"" + detail::fmt_fixed(ax.map(re0)) + "\" y1=\"" +
             detail::fmt_fixed(ay.map(tau0)) + "\" x2=\"" + detail::fmt_fixed(ax.map(re1)) +
             "\" y2=\"" + detail::fmt_fixed(ay.map(tau1)) +
             "\" stroke=\"#e15759\" stroke-width=\"1.5\"/>\n";
        s += "<text x=\"" + detail::fmt_fixed(width - mr - 8) + "\" y=\"" +
             detail::fmt_fixed(mt + 18) +
             "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"end\">slope = " +
             detail::fmt_fixed(fit->exponent) + ", k1 = " + detail::fmt_fixed(fit->prefactor_k1) +
             ", R2 = " + detail::fmt_fixed(fit->r_squared, 4) + "</text>\n";
    }

    for (const SweepRow& r : rows) {
        if (!r.hit || !r.tau_trans || !(*r.tau_trans > 0.0)) continue;
        s += "<circle cx=\"" + detail::fmt_fixed(ax.map(r.re)) + "\" cy=\"" +
             detail::fmt_fixed(ay.map(*r.tau_trans)) +
             "\" r=\"4\" fill=\"#4e79a7\" stroke=\"#2f4b7c\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

inline const char* regime_color(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::Laminar: return "#4e79a7";
        case RegimeLabel::CriticalEquilibrium: return "#59a14f";
        case RegimeLabel::SingularityOnset: return "#f28e2b";
        case RegimeLabel::TransitionInstant: return "#e15759";
        case RegimeLabel::FullyTurbulent: return "#79706e";
    }
    return "#000000";
}

/// Strip chart of the regime label over time with the decay indicator
/// drawn on top; the visual summary for the report subcommand.
inline std::string svg_regime_strip(const std::vector<DiagnosticRecord>& records,
                                    const std::string& timestamp = "") {
    const int width = 760, height = 300;
    const double ml = 60, mr = 20, mt = 60, mb = 45;
    const double plot_w = width - ml - mr, plot_h = height - mt - mb;

    double t0 = records.empty() ? 0.0 : records.front().time;
    double t1 = records.empty() ? 1.0 : records.back().time;
    if (t1 - t0 < 1e-300) t1 = t0 + 1.0;
    auto map_t = [&](double t) { return ml + (t - t0) / (t1 - t0) * plot_w; };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
         " " + std::to_string(height) + "\">\n";
    if (!timestamp.empty()) s += "<!-- generated " + timestamp + " -->\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + std::to_string(width / 2) +
         "\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">"
         "Flow regime timeline</text>\n";

    // One band per snapshot, spanning half-way to each neighbor.
    for (size_t k = 0; k < records.size(); ++k) {
        double left = (k == 0) ? records[k].time
                               : 0.5 * (records[k - 1].time + records[k].time);
        double right = (k + 1 == records.size())
                           ? records[k].time
                           : 0.5 * (records[k].time + records[k + 1].time);
        if (records.size() == 1) {
            left = t0;
            right = t1;
        }
        s += "<rect x=\"" + detail::fmt_fixed(map_t(left)) + "\" y=\"" + detail::fmt_fixed(mt) +
             "\" width=\"" + detail::fmt_fixed(std::max(0.5, map_t(right) - map_t(left))) +
             "\" height=\"" + detail::fmt_fixed(plot_h) + "\" fill=\"" +
             regime_color(records[k].regime_label) + "\" fill-opacity=\"0.55\"/>\n";
    }

    // Decay indicator polyline, scaled to the strip height (1 at top).
    if (records.size() > 1) {
        std::string pts;
        for (const DiagnosticRecord& r : records) {
            double py = mt + (1.0 - r.singularity_indicator) * plot_h;
            pts += detail::fmt_fixed(map_t(r.time)) + "," + detail::fmt_fixed(py) + " ";
        }
        s += "<polyline points=\"" + pts +
             "\" fill=\"none\" stroke=\"#111111\" stroke-width=\"1.5\"/>\n";
    }

    s += "<rect x=\"" + detail::fmt_fixed(ml) + "\" y=\"" + detail::fmt_fixed(mt) + "\" width=\"" +
         detail::fmt_fixed(plot_w) + "\" height=\"" + detail::fmt_fixed(plot_h) +
         "\" fill=\"none\" stroke=\"#333333\"/>\n";
    s += "<text x=\"" + std::to_string(width / 2) + "\" y=\"" + std::to_string(height - 10) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">time (t0 = " +
         detail::fmt_compact(t0) + ", t1 = " + detail::fmt_compact(t1) + ")</text>\n";
    s += "<text x=\"" + detail::fmt_fixed(ml - 8) + "\" y=\"" + detail::fmt_fixed(mt + 10) +
         "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1</text>\n";
    s += "<text x=\"" + detail::fmt_fixed(ml - 8) + "\" y=\"" + detail::fmt_fixed(mt + plot_h) +
         "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">0</text>\n";

    // Legend.
    double lx = ml, ly = mt - 18;
    for (RegimeLabel label :
         {RegimeLabel::Laminar, RegimeLabel::CriticalEquilibrium, RegimeLabel::SingularityOnset,
          RegimeLabel::TransitionInstant, RegimeLabel::FullyTurbulent}) {
        s += "<rect x=\"" + detail::fmt_fixed(lx) + "\" y=\"" + detail::fmt_fixed(ly - 9) +
             "\" width=\"10\" height=\"10\" fill=\"" + std::string(regime_color(label)) +
             "\" fill-opacity=\"0.55\"/>\n";
        s += "<text x=\"" + detail::fmt_fixed(lx + 14) + "\" y=\"" + detail::fmt_fixed(ly) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + to_string(label) + "</text>\n";
        lx += 14.0 + 7.0 * static_cast<double>(std::string(to_string(label)).size()) + 18.0;
    }

    s += "</svg>\n";
    return s;
}

} // namespace leray
