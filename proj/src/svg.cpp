#include "famoel/svg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace famoel::svg {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 440;
constexpr double kLeft = 80;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void finish() {
        if (!std::isfinite(lo)) {
            lo = 0;
            hi = 1;
        }
        if (hi - lo <= 0) {
            const double pad = lo == 0 ? 1.0 : std::abs(lo) * 0.05;
            lo -= pad;
            hi += pad;
        }
    }
};

std::string header(const std::string& title) {
    std::ostringstream os;
    os << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << kWidth << R"(" height=")" << kHeight
       << R"(" font-family="sans-serif" font-size="12">)" << '\n'
       << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n'
       << R"(<text x=")" << kWidth / 2 << R"(" y="22" text-anchor="middle" font-size="15">)" << escape(title)
       << "</text>\n";
    return os.str();
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series) {
    Range xr, yr;
    for (const auto& s : series) {
        for (double v : s.x) xr.add(v);
        for (double v : s.y) yr.add(v);
    }
    xr.finish();
    yr.finish();
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

    std::ostringstream os;
    os << header(title);
    os << R"(<rect x=")" << kLeft << R"(" y=")" << kTop << R"(" width=")" << pw << R"(" height=")" << ph
       << R"(" fill="none" stroke="black"/>)" << '\n';
    for (int i = 0; i <= 4; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
        const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
        os << R"(<text x=")" << px(fx) << R"(" y=")" << kTop + ph + 18 << R"(" text-anchor="middle">)" << num(fx)
           << "</text>\n";
        os << R"(<text x=")" << kLeft - 6 << R"(" y=")" << py(fy) + 4 << R"(" text-anchor="end">)" << num(fy)
           << "</text>\n";
    }
    os << R"(<text x=")" << kLeft + pw / 2 << R"(" y=")" << kHeight - 15 << R"(" text-anchor="middle">)"
       << escape(x_label) << "</text>\n";
    os << R"(<text x="18" y=")" << kTop + ph / 2 << R"(" text-anchor="middle" transform="rotate(-90 18 )"
       << kTop + ph / 2 << ")\">" << escape(y_label) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % std::size(kPalette)];
        os << R"(<polyline fill="none" stroke=")" << color << R"(" stroke-width="2" points=")";
        const std::size_t n = std::min(series[s].x.size(), series[s].y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(series[s].y[i])) continue;
            os << num(px(series[s].x[i])) << ',' << num(py(series[s].y[i])) << ' ';
        }
        os << R"("/>)" << '\n';
        if (n == 1) {
            os << R"(<circle cx=")" << px(series[s].x[0]) << R"(" cy=")" << py(series[s].y[0]) << R"(" r="3" fill=")"
               << color << R"("/>)" << '\n';
        }
        const double ly = kTop + 14 + 18.0 * static_cast<double>(s);
        os << R"(<line x1=")" << kWidth - kRight + 12 << R"(" y1=")" << ly << R"(" x2=")" << kWidth - kRight + 36
           << R"(" y2=")" << ly << R"(" stroke=")" << color << R"(" stroke-width="2"/>)" << '\n';
        os << R"(<text class="legend" x=")" << kWidth - kRight + 40 << R"(" y=")" << ly + 4 << R"(">)"
           << escape(series[s].name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string heatmap(const std::string& title, const std::string& row_axis, const Matrix& cells,
                    const std::vector<std::string>& column_labels) {
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const double cw = cells.cols() ? pw / static_cast<double>(cells.cols()) : pw;
    const double ch = cells.rows() ? ph / static_cast<double>(cells.rows()) : ph;
    std::ostringstream os;
    os << header(title);
    for (std::size_t r = 0; r < cells.rows(); ++r) {
        for (std::size_t c = 0; c < cells.cols(); ++c) {
            const double v = std::clamp(cells(r, c), 0.0, 1.0);
            const int shade = static_cast<int>(std::lround(255.0 * (1.0 - v)));
            os << R"(<rect class="cell" x=")" << num(kLeft + cw * static_cast<double>(c)) << R"(" y=")"
               << num(kTop + ch * static_cast<double>(r)) << R"(" width=")" << num(cw) << R"(" height=")" << num(ch)
               << R"(" fill="rgb()" << shade << ',' << shade << ",255)\"/>\n";
        }
    }
    os << R"(<rect x=")" << kLeft << R"(" y=")" << kTop << R"(" width=")" << pw << R"(" height=")" << ph
       << R"(" fill="none" stroke="black"/>)" << '\n';
    for (std::size_t c = 0; c < column_labels.size() && c < cells.cols(); ++c) {
        const double x = kLeft + cw * (static_cast<double>(c) + 0.5);
        os << R"(<text x=")" << num(x) << R"(" y=")" << kTop + ph + 14 << R"(" text-anchor="end" font-size="9" )"
           << R"(transform="rotate(-60 )" << num(x) << ' ' << kTop + ph + 14 << ")\">" << escape(column_labels[c])
           << "</text>\n";
    }
    os << R"(<text x="18" y=")" << kTop + ph / 2 << R"(" text-anchor="middle" transform="rotate(-90 18 )"
       << kTop + ph / 2 << ")\">" << escape(row_axis) << "</text>\n";
    // legend
    os << R"(<rect x=")" << kWidth - kRight + 12 << R"(" y=")" << kTop + 4 << R"~(" width="14" height="14" fill="rgb(0,0,255)"/>)~"
       << R"(<text class="legend" x=")" << kWidth - kRight + 32 << R"(" y=")" << kTop + 15 << R"(">selected</text>)"
       << '\n'
       << R"(<rect x=")" << kWidth - kRight + 12 << R"(" y=")" << kTop + 24
       << R"(" width="14" height="14" fill="white" stroke="black"/>)"
       << R"(<text class="legend" x=")" << kWidth - kRight + 32 << R"(" y=")" << kTop + 35
       << R"(">not selected</text>)" << '\n';
    os << "</svg>\n";
    return os.str();
}

std::string bar_chart(const std::string& title, const std::string& y_label, const std::vector<std::string>& labels,
                      const std::vector<double>& values) {
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    double hi = 0.0;
    for (double v : values) hi = std::max(hi, v);
    if (hi <= 0) hi = 1;
    const double bw = values.empty() ? pw : pw / static_cast<double>(values.size());
    std::ostringstream os;
    os << header(title);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double h = values[i] / hi * ph;
        os << R"(<rect class="bar" x=")" << num(kLeft + bw * static_cast<double>(i) + 1) << R"(" y=")"
           << num(kTop + ph - h) << R"(" width=")" << num(std::max(1.0, bw - 2)) << R"(" height=")" << num(h)
           << R"(" fill="#1f77b4"/>)" << '\n';
        if (i < labels.size()) {
            const double x = kLeft + bw * (static_cast<double>(i) + 0.5);
            os << R"(<text x=")" << num(x) << R"(" y=")" << kTop + ph + 14
               << R"(" text-anchor="end" font-size="9" transform="rotate(-60 )" << num(x) << ' ' << kTop + ph + 14
               << ")\">" << escape(labels[i]) << "</text>\n";
        }
    }
    os << R"(<rect x=")" << kLeft << R"(" y=")" << kTop << R"(" width=")" << pw << R"(" height=")" << ph
       << R"(" fill="none" stroke="black"/>)" << '\n';
    for (int i = 0; i <= 4; ++i) {
        const double v = hi * i / 4.0;
        os << R"(<text x=")" << kLeft - 6 << R"(" y=")" << kTop + ph - ph * i / 4.0 + 4 << R"(" text-anchor="end">)"
           << num(v) << "</text>\n";
    }
    os << R"(<text x="18" y=")" << kTop + ph / 2 << R"(" text-anchor="middle" transform="rotate(-90 18 )"
       << kTop + ph / 2 << ")\">" << escape(y_label) << "</text>\n";
    os << R"(<rect x=")" << kWidth - kRight + 12 << R"(" y=")" << kTop + 4
       << R"(" width="14" height="14" fill="#1f77b4"/><text class="legend" x=")" << kWidth - kRight + 32
       << R"(" y=")" << kTop + 15 << "\">" << escape(y_label) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace famoel::svg
