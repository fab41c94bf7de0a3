#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>

#include "dataset.hpp"

namespace seqmine::plot {

inline constexpr int width = 640;
inline constexpr int height = 400;
inline constexpr int left = 60;
inline constexpr int right = 620;
inline constexpr int top = 30;
inline constexpr int bottom = 350;

namespace detail {

inline std::string milli(std::int64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld.%03lld", static_cast<long long>(v / 1000), static_cast<long long>(v % 1000));
    return buf;
}

} // namespace detail

/// Screen y (in thousandths of a pixel) for a percentage; 0..100 maps to
/// bottom..top.
inline std::int64_t y_milli(Centi pct) {
    return std::int64_t{top} * 1000 + (10000 - pct.value) * (bottom - top) * 1000 / 10000;
}

inline std::int64_t x_milli(int year, int first, int last) {
    if (first == last) return std::int64_t{left + right} * 500;
    return std::int64_t{left} * 1000 + std::int64_t{year - first} * (right - left) * 1000 / (last - first);
}

/// Fixed 640x400 line chart: year on x, pass percentage (0-100) on y.
inline std::string svg_chart(const SubjectTrend& s) {
    const int first = s.points.front().year;
    const int last = s.points.back().year;
    std::string o;
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
    o += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
    o += "<text x=\"340\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
         "Result Graph for " + s.subject_code + "</text>\n";
    o += "<line x1=\"60\" y1=\"350\" x2=\"620\" y2=\"350\" stroke=\"black\"/>\n";
    o += "<line x1=\"60\" y1=\"30\" x2=\"60\" y2=\"350\" stroke=\"black\"/>\n";
    for (int pct = 0; pct <= 100; pct += 20) {
        const auto y = detail::milli(y_milli(Centi{pct * 100}));
        o += "<line x1=\"55\" y1=\"" + y + "\" x2=\"60\" y2=\"" + y + "\" stroke=\"black\"/>\n";
        o += "<text x=\"50\" y=\"" + y + "\" text-anchor=\"end\" dominant-baseline=\"middle\" "
             "font-family=\"sans-serif\" font-size=\"11\">" + std::to_string(pct) + "</text>\n";
    }
    for (const auto& p : s.points) {
        const auto x = detail::milli(x_milli(p.year, first, last));
        o += "<line x1=\"" + x + "\" y1=\"350\" x2=\"" + x + "\" y2=\"355\" stroke=\"black\"/>\n";
        o += "<text x=\"" + x + "\" y=\"368\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
             std::to_string(p.year) + "</text>\n";
    }
    o += "<text x=\"340\" y=\"392\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">Year</text>\n";
    o += "<text x=\"16\" y=\"190\" transform=\"rotate(-90 16 190)\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"12\">Pass percentage</text>\n";
    o += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        const auto& p = s.points[i];
        o += (i ? " " : "") + detail::milli(x_milli(p.year, first, last)) + "," + detail::milli(y_milli(p.pass_pct));
    }
    o += "\"/>\n";
    for (const auto& p : s.points)
        o += "<circle cx=\"" + detail::milli(x_milli(p.year, first, last)) + "\" cy=\"" +
             detail::milli(y_milli(p.pass_pct)) + "\" r=\"3\" fill=\"steelblue\"><title>" + std::to_string(p.year) +
             ": " + p.pass_pct.str() + "</title></circle>\n";
    o += "</svg>\n";
    return o;
}

/// Horizontal bar per year, one '#' per two percentage points.
inline std::string ascii_chart(const SubjectTrend& s) {
    std::string o = s.subject_code + "\n";
    for (const auto& p : s.points) {
        const auto bars = static_cast<std::size_t>((p.pass_pct.value + 100) / 200);
        o += "  " + std::to_string(p.year) + " |" + std::string(bars, '#') + std::string(50 - std::min<std::size_t>(bars, 50), ' ') +
             "| " + p.pass_pct.str() + "\n";
    }
    return o;
}

} // namespace seqmine::plot
