#include "platopt/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace platopt {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 160.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

const char* colour(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x_min, x_max, y_min, y_max;
    double px(double x) const {
        return kLeft + (x - x_min) / (x_max - x_min) * (kWidth - kLeft - kRight);
    }
    double py(double y) const {
        return kHeight - kBottom - (y - y_min) / (y_max - y_min) * (kHeight - kTop - kBottom);
    }
};

std::string header(const std::string& title) {
    return fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{2}\" y=\"22\" font-size=\"15\">{3}</text>\n",
        kWidth, kHeight, kLeft, escape(title));
}

std::string axes(const Frame& f, const std::string& x_label, const std::string& y_label,
                 bool x_ticks) {
    std::string s;
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", x0, y0, x1, y0);
    s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", x0, y0, x0, y1);
    for (int i = 0; i <= 4; ++i) {
        const double y = f.y_min + (f.y_max - f.y_min) * i / 4.0;
        s += fmt::format(
            "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n"
            "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#ddd\"/>\n",
            x0 - 5, f.py(y) + 4, y, x0, f.py(y), x1, f.py(y));
        if (x_ticks) {
            const double x = f.x_min + (f.x_max - f.x_min) * i / 4.0;
            s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.3g}</text>\n",
                             f.px(x), y0 + 16, x);
        }
    }
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                     (x0 + x1) / 2, kHeight - 12, escape(x_label));
    s += fmt::format(
        "<text x=\"16\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1f})\">{}</text>\n",
        (y0 + y1) / 2, (y0 + y1) / 2, escape(y_label));
    return s;
}

std::string legend(const std::vector<PlotSeries>& series) {
    std::string s;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double y = kTop + 16.0 * static_cast<double>(i);
        s += fmt::format(
            "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"10\" height=\"10\" fill=\"{}\"/>"
            "<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n",
            kWidth - kRight + 10, y, colour(i), kWidth - kRight + 25, y + 9,
            escape(series[i].label));
    }
    return s;
}

void pad_range(double& lo, double& hi) {
    if (!(hi > lo)) {
        lo -= 1.0;
        hi += 1.0;
    }
}

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<PlotSeries>& series,
                           double x_scale, bool stacked) {
    std::size_t n = 0;
    for (const auto& s : series) n = std::max(n, s.values.size());
    std::vector<std::vector<double>> tops;
    std::vector<double> running(n, 0.0);
    for (const auto& s : series) {
        std::vector<double> top(n, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double v = t < s.values.size() ? s.values[t] : 0.0;
            top[t] = stacked ? running[t] + v : v;
            if (stacked) running[t] = top[t];
        }
        tops.push_back(std::move(top));
    }
    double lo = stacked ? 0.0 : INFINITY, hi = stacked ? 0.0 : -INFINITY;
    for (const auto& top : tops) {
        for (double v : top) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    pad_range(lo, hi);
    Frame f{0.0, std::max(1.0, static_cast<double>(n > 0 ? n - 1 : 1)) * x_scale, lo, hi};

    std::string svg = header(title) + axes(f, x_label, y_label, true);
    for (std::size_t i = 0; i < tops.size(); ++i) {
        std::string points;
        for (std::size_t t = 0; t < n; ++t) {
            points += fmt::format("{:.2f},{:.2f} ", f.px(static_cast<double>(t) * x_scale),
                                  f.py(tops[i][t]));
        }
        if (stacked) {
            std::string base;
            for (std::size_t t = n; t-- > 0;) {
                const double below = i == 0 ? 0.0 : tops[i - 1][t];
                base += fmt::format("{:.2f},{:.2f} ", f.px(static_cast<double>(t) * x_scale),
                                    f.py(below));
            }
            svg += fmt::format("<polygon points=\"{}{}\" fill=\"{}\" fill-opacity=\"0.6\"/>\n",
                               points, base, colour(i));
        } else {
            svg += fmt::format(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                points, colour(i));
        }
    }
    return svg + legend(series) + "</svg>\n";
}

std::string bar_chart_svg(const std::string& title, const std::vector<std::string>& categories,
                          const std::vector<PlotSeries>& series) {
    double hi = 0.0;
    double lo = 0.0;
    for (const auto& s : series) {
        for (double v : s.values) {
            hi = std::max(hi, v);
            lo = std::min(lo, v);
        }
    }
    pad_range(lo, hi);
    const double groups = static_cast<double>(std::max<std::size_t>(1, categories.size()));
    Frame f{0.0, groups, lo, hi};
    std::string svg = header(title) + axes(f, "", "", false);
    const double group_width = (f.px(1.0) - f.px(0.0)) * 0.8;
    const double bar = group_width / static_cast<double>(std::max<std::size_t>(1, series.size()));
    for (std::size_t c = 0; c < categories.size(); ++c) {
        const double x0 = f.px(static_cast<double>(c)) + (f.px(1.0) - f.px(0.0)) * 0.1;
        for (std::size_t i = 0; i < series.size(); ++i) {
            const double v = c < series[i].values.size() ? series[i].values[c] : 0.0;
            const double top = f.py(std::max(v, 0.0));
            const double bottom = f.py(std::min(v, 0.0));
            svg += fmt::format(
                "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                x0 + bar * static_cast<double>(i), top, bar * 0.95, bottom - top, colour(i));
        }
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                           x0 + group_width / 2, kHeight - kBottom + 16, escape(categories[c]));
    }
    return svg + legend(series) + "</svg>\n";
}

}  // namespace platopt
