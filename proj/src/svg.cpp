#include "nf/svg.hpp"

#include "nf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace nf {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 440;
constexpr double kLeft = 70;
constexpr double kRight = 610;
constexpr double kTop = 50;
constexpr double kBottom = 390;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct AxisRange {
    double lo = 0.0;
    double hi = 1.0;

    double to_px_x(double v) const { return kLeft + (v - lo) / (hi - lo) * (kRight - kLeft); }
    double to_px_y(double v) const { return kBottom - (v - lo) / (hi - lo) * (kBottom - kTop); }
};

AxisRange padded_range(double lo, double hi) {
    if (!(lo < hi)) {
        const double pad = std::max(1.0, std::abs(lo)) * 0.1;
        return {lo - pad, hi + pad};
    }
    const double pad = (hi - lo) * 0.05;
    return {lo - pad, hi + pad};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

class SvgDoc {
public:
    SvgDoc(const std::string& path, const AxisRange& x, const AxisRange& y) : out_(path), x_(x), y_(y) {
        if (!out_) throw IoError("cannot write '" + path + "'");
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
             << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\""
             << " data-x-lo=\"" << fmt(x.lo) << "\" data-x-hi=\"" << fmt(x.hi) << "\""
             << " data-y-lo=\"" << fmt(y.lo) << "\" data-y-hi=\"" << fmt(y.hi) << "\""
             << " data-plot=\"" << kLeft << " " << kTop << " " << kRight << " " << kBottom << "\">\n";
        out_ << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
             << "\" fill=\"white\"/>\n";
    }

    void title(const std::string& text) {
        out_ << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\" "
             << "font-family=\"sans-serif\">" << escape(text) << "</text>\n";
    }

    void axes(const std::string& x_label, const std::string& y_label) {
        out_ << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight << "\" y2=\""
             << kBottom << "\" stroke=\"black\"/>\n";
        out_ << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
             << kBottom << "\" stroke=\"black\"/>\n";
        for (int i = 0; i <= 5; ++i) {
            const double fx = x_.lo + (x_.hi - x_.lo) * i / 5.0;
            const double fy = y_.lo + (y_.hi - y_.lo) * i / 5.0;
            const double px = x_.to_px_x(fx);
            const double py = y_.to_px_y(fy);
            out_ << "<line x1=\"" << fmt_px(px) << "\" y1=\"" << kBottom << "\" x2=\"" << fmt_px(px)
                 << "\" y2=\"" << kBottom + 5 << "\" stroke=\"black\"/>\n";
            out_ << "<text x=\"" << fmt_px(px) << "\" y=\"" << kBottom + 20
                 << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(fx)
                 << "</text>\n";
            out_ << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fmt_px(py) << "\" x2=\"" << kLeft
                 << "\" y2=\"" << fmt_px(py) << "\" stroke=\"black\"/>\n";
            out_ << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt_px(py + 4)
                 << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(fy)
                 << "</text>\n";
        }
        out_ << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 8
             << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << escape(x_label)
             << "</text>\n";
        out_ << "<text x=\"16\" y=\"" << (kTop + kBottom) / 2
             << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" transform=\"rotate(-90 16 "
             << (kTop + kBottom) / 2 << ")\">" << escape(y_label) << "</text>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                  const std::string& css_class) {
        out_ << "<polyline class=\"" << css_class << "\" fill=\"none\" stroke=\"" << color
             << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : pts) out_ << fmt_px(x_.to_px_x(x)) << ',' << fmt_px(y_.to_px_y(y)) << ' ';
        out_ << "\"/>\n";
    }

    void circles(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
        for (const auto& [x, y] : pts)
            out_ << "<circle cx=\"" << fmt_px(x_.to_px_x(x)) << "\" cy=\"" << fmt_px(y_.to_px_y(y))
                 << "\" r=\"2\" fill=\"" << color << "\" fill-opacity=\"0.5\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& color) {
        out_ << "<line x1=\"" << fmt_px(x_.to_px_x(x1)) << "\" y1=\"" << fmt_px(y_.to_px_y(y1))
             << "\" x2=\"" << fmt_px(x_.to_px_x(x2)) << "\" y2=\"" << fmt_px(y_.to_px_y(y2))
             << "\" stroke=\"" << color << "\" stroke-dasharray=\"4 3\"/>\n";
    }

    void annotation(const std::string& text, const std::string& css_class) {
        out_ << "<text class=\"" << css_class << "\" x=\"" << kLeft + 12 << "\" y=\"" << kTop + 18
             << "\" font-size=\"13\" font-family=\"sans-serif\">" << escape(text) << "</text>\n";
    }

    void legend(const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            const double y = kTop + 16 + 16 * static_cast<double>(i);
            out_ << "<rect x=\"" << kRight - 150 << "\" y=\"" << y - 9 << "\" width=\"10\" height=\"10\" fill=\""
                 << kPalette[i % 8] << "\"/>\n";
            out_ << "<text x=\"" << kRight - 135 << "\" y=\"" << y
                 << "\" font-size=\"12\" font-family=\"sans-serif\">" << escape(names[i]) << "</text>\n";
        }
    }

    void close(const std::string& path) {
        out_ << "</svg>\n";
        if (!out_) throw IoError("write failed for '" + path + "'");
    }

private:
    std::ofstream out_;
    AxisRange x_;
    AxisRange y_;
};

} // namespace

void write_line_plot(const std::string& path, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<SvgSeries>& series) {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
        }
    }
    if (!std::isfinite(xlo)) { xlo = 0; xhi = 1; ylo = 0; yhi = 1; }

    SvgDoc doc(path, padded_range(xlo, xhi), padded_range(ylo, yhi));
    doc.title(title);
    doc.axes(x_label, y_label);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < series.size(); ++i) {
        auto pts = series[i].points;
        std::sort(pts.begin(), pts.end());
        doc.polyline(pts, kPalette[i % 8], "series");
        names.push_back(series[i].name);
    }
    doc.legend(names);
    doc.close(path);
}

void write_scatter_plot(const std::string& path, const std::string& title,
                        const std::vector<std::pair<double, double>>& points,
                        std::optional<double> r) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& [x, y] : points) {
        lo = std::min({lo, x, y});
        hi = std::max({hi, x, y});
    }
    if (!std::isfinite(lo)) { lo = 0; hi = 1; }
    const AxisRange range = padded_range(lo, hi);

    SvgDoc doc(path, range, range);
    doc.title(title);
    doc.axes("observed", "predicted");
    doc.line(range.lo, range.lo, range.hi, range.hi, "#888888");
    doc.circles(points, "#1f77b4");
    char buf[48];
    if (r) std::snprintf(buf, sizeof(buf), "R = %.7f", *r);
    else std::snprintf(buf, sizeof(buf), "R undefined (zero variance)");
    doc.annotation(buf, "r-annotation");
    doc.close(path);
}

void write_mf_curves(const std::string& path, const InputPartition& partition) {
    const AxisRange x{partition.lo, partition.hi};
    const AxisRange y{0.0, 1.05};
    SvgDoc doc(path, x, y);
    doc.title("Membership degree vs " + partition.name);
    doc.axes(partition.name, "degree of membership");

    constexpr int kSamples = 200;
    for (std::size_t m = 0; m < partition.mfs.size(); ++m) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(kSamples + 2);
        for (int i = 0; i <= kSamples; ++i) {
            const double v = partition.lo + (partition.hi - partition.lo) * i / kSamples;
            pts.emplace_back(v, mf_eval(partition.mfs[m], v));
        }
        const double c = partition.mfs[m].center;
        if (c >= partition.lo && c <= partition.hi) pts.emplace_back(c, 1.0);
        std::sort(pts.begin(), pts.end());
        doc.polyline(pts, kPalette[m % 8], "mf-curve");
    }
    doc.close(path);
}

} // namespace nf
