#include "ddelab/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ddelab {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

void CsvTable::add_row(std::span<const double> values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    rows.push_back(std::move(cells));
}

void CsvTable::add_row(std::vector<std::string> cells) {
    rows.push_back(std::move(cells));
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::string text;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) text += ',';
        text += table.columns[c];
    }
    text += '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw std::invalid_argument("write_csv: row width mismatch");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) text += ',';
            text += row[c];
        }
        text += '\n';
    }
    write_text_file(path, text);
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[40];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += ch;
        }
    }
    return out;
}

struct Range {
    double lo = 0.0, hi = 1.0;
    double span() const { return hi - lo; }
};

Range padded(double lo, double hi) {
    if (!(hi > lo)) {
        const double pad = std::max(1e-9, std::abs(lo) * 1e-3);
        return {lo - pad, hi + pad};
    }
    const double pad = 0.03 * (hi - lo);
    return {lo - pad, hi + pad};
}

std::vector<double> linear_ticks(const Range& r) {
    const double raw = r.span() / 5.0;
    double step = std::pow(10.0, std::floor(std::log10(raw)));
    const double q = raw / step;
    step *= (q >= 5.0) ? 5.0 : (q >= 2.0) ? 2.0 : 1.0;
    std::vector<double> ticks;
    for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-9 * step; t += step)
        ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    return ticks;
}

// Ticks in log10 space: decades, with 2 and 5 mantissas when the range
// is narrow enough for them to breathe.
std::vector<double> log_ticks(const Range& r) {
    std::vector<double> ticks;
    const bool mantissas = r.span() <= 3.5;
    for (int d = static_cast<int>(std::floor(r.lo)) - 1;
         d <= static_cast<int>(std::ceil(r.hi)) + 1; ++d) {
        for (double m : mantissas ? std::vector<double>{1.0, 2.0, 5.0}
                                  : std::vector<double>{1.0}) {
            const double t = d + std::log10(m);
            if (t >= r.lo - 1e-9 && t <= r.hi + 1e-9) ticks.push_back(t);
        }
    }
    return ticks;
}

std::string tick_label(double value, bool log_scale) {
    if (!log_scale) return fmt(value, "%g");
    return fmt(std::pow(10.0, value), "%g");
}

}  // namespace

void write_svg_plot(const std::string& path, std::span<const PlotSeries> series,
                    const PlotOptions& opts) {
    const double W = opts.width, H = opts.height;
    const double ml = 72, mr = 18, mt = 42, mb = 52;

    // Collect transformed extents.
    bool any = false;
    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    auto transform_y = [&](double y) {
        if (opts.y_cap && y > *opts.y_cap) y = *opts.y_cap;
        return opts.log_y ? std::log10(y) : y;
    };
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (opts.log_y && !(s.y[i] > 0.0)) continue;
            const double ty = transform_y(s.y[i]);
            if (!std::isfinite(s.x[i]) || !std::isfinite(ty)) continue;
            if (!any) {
                xlo = xhi = s.x[i];
                ylo = yhi = ty;
                any = true;
            } else {
                xlo = std::min(xlo, s.x[i]);
                xhi = std::max(xhi, s.x[i]);
                ylo = std::min(ylo, ty);
                yhi = std::max(yhi, ty);
            }
        }
    }
    if (opts.marker_x) {
        if (!any) {
            xlo = xhi = *opts.marker_x;
            any = true;
        }
        xlo = std::min(xlo, *opts.marker_x);
        xhi = std::max(xhi, *opts.marker_x);
    }
    Range xr = padded(xlo, xhi);
    Range yr = padded(ylo, yhi);
    if (opts.equal_axes && !opts.log_y) {
        const double pw = W - ml - mr, ph = H - mt - mb;
        const double scale = std::max(xr.span() / pw, yr.span() / ph);
        const double xc = (xr.lo + xr.hi) / 2.0, yc = (yr.lo + yr.hi) / 2.0;
        xr = {xc - scale * pw / 2.0, xc + scale * pw / 2.0};
        yr = {yc - scale * ph / 2.0, yc + scale * ph / 2.0};
    }

    auto px = [&](double x) { return ml + (x - xr.lo) / xr.span() * (W - ml - mr); };
    auto py = [&](double y) {
        return H - mb - (transform_y(y) - yr.lo) / yr.span() * (H - mt - mb);
    };
    auto py_t = [&](double ty) {
        return H - mb - (ty - yr.lo) / yr.span() * (H - mt - mb);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W, "%g") +
           "\" height=\"" + fmt(H, "%g") + "\" viewBox=\"0 0 " + fmt(W, "%g") + " " +
           fmt(H, "%g") + "\">\n";
    if (!opts.metadata.empty()) {
        svg += "<!--\n";
        for (std::string line : opts.metadata) {
            std::size_t pos;
            while ((pos = line.find("--")) != std::string::npos)
                line.replace(pos, 2, "- -");
            svg += line + "\n";
        }
        svg += "-->\n";
    }
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">\n";

    // Frame and ticks.
    svg += "<rect x=\"" + fmt(ml, "%g") + "\" y=\"" + fmt(mt, "%g") + "\" width=\"" +
           fmt(W - ml - mr, "%g") + "\" height=\"" + fmt(H - mt - mb, "%g") +
           "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (double t : linear_ticks(xr)) {
        const double x = px(t);
        svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(H - mb) + "\" x2=\"" + fmt(x) +
               "\" y2=\"" + fmt(H - mb + 5) + "\" stroke=\"#444\"/>\n";
        svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(mt) + "\" x2=\"" + fmt(x) +
               "\" y2=\"" + fmt(H - mb) + "\" stroke=\"#eee\"/>\n";
        svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(H - mb + 18) +
               "\" text-anchor=\"middle\">" + tick_label(t, false) + "</text>\n";
    }
    const std::vector<double> yticks =
        opts.log_y ? log_ticks(yr) : linear_ticks(yr);
    for (double t : yticks) {
        const double y = py_t(t);
        svg += "<line x1=\"" + fmt(ml - 5) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(ml) +
               "\" y2=\"" + fmt(y) + "\" stroke=\"#444\"/>\n";
        svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(W - mr) +
               "\" y2=\"" + fmt(y) + "\" stroke=\"#eee\"/>\n";
        svg += "<text x=\"" + fmt(ml - 8) + "\" y=\"" + fmt(y + 4) +
               "\" text-anchor=\"end\">" + tick_label(t, opts.log_y) + "</text>\n";
    }

    // Labels and title.
    if (!opts.title.empty())
        svg += "<text x=\"" + fmt(0.5 * W) + "\" y=\"24\" text-anchor=\"middle\" "
               "font-size=\"15\">" + escape_xml(opts.title) + "</text>\n";
    if (!opts.x_label.empty())
        svg += "<text x=\"" + fmt(ml + 0.5 * (W - ml - mr)) + "\" y=\"" +
               fmt(H - 12) + "\" text-anchor=\"middle\">" + escape_xml(opts.x_label) +
               "</text>\n";
    if (!opts.y_label.empty())
        svg += "<text x=\"16\" y=\"" + fmt(mt + 0.5 * (H - mt - mb)) +
               "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
               fmt(mt + 0.5 * (H - mt - mb)) + ")\">" + escape_xml(opts.y_label) +
               "</text>\n";

    // Marker.
    if (opts.marker_x && *opts.marker_x >= xr.lo && *opts.marker_x <= xr.hi) {
        const double x = px(*opts.marker_x);
        svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(mt) + "\" x2=\"" + fmt(x) +
               "\" y2=\"" + fmt(H - mb) +
               "\" stroke=\"#999\" stroke-dasharray=\"5 4\"/>\n";
        if (!opts.marker_label.empty())
            svg += "<text x=\"" + fmt(x + 4) + "\" y=\"" + fmt(mt + 14) +
                   "\" font-size=\"11\" fill=\"#666\">" +
                   escape_xml(opts.marker_label) + "</text>\n";
    }

    // Series.
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % kPaletteSize];
        std::string points;
        bool open = false;
        auto flush = [&]() {
            if (open && !points.empty())
                svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                       "\" stroke-width=\"1.4\" points=\"" + points + "\"/>\n";
            points.clear();
            open = false;
        };
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if ((opts.log_y && !(s.y[i] > 0.0)) || !std::isfinite(s.x[i]) ||
                !std::isfinite(s.y[i])) {
                flush();
                continue;
            }
            points += fmt(px(s.x[i])) + "," + fmt(py(s.y[i])) + " ";
            open = true;
        }
        flush();
    }

    // Legend.
    double ly = mt + 14;
    for (std::size_t k = 0; k < series.size(); ++k) {
        if (series[k].label.empty()) continue;
        const double lx = W - mr - 150;
        svg += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" +
               fmt(lx + 22) + "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" +
               kPalette[k % kPaletteSize] + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt(lx + 28) + "\" y=\"" + fmt(ly) + "\">" +
               escape_xml(series[k].label) + "</text>\n";
        ly += 17;
    }

    svg += "</g>\n</svg>\n";
    write_text_file(path, svg);
}

}  // namespace ddelab
