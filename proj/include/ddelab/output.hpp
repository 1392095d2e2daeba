#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ddelab {

/// Shortest decimal representation that round-trips a double (17
/// significant digits via %.17g, trimmed by the printf library).
std::string format_double(double value);

void write_text_file(const std::string& path, const std::string& content);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::span<const double> values);
    void add_row(std::vector<std::string> cells);
};

/// UTF-8, comma separated, one header row, full-precision floats.
void write_csv(const std::string& path, const CsvTable& table);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    /// Stretch the narrower axis range so both axes share one scale
    /// (data units per pixel); phase portraits keep circles round.
    bool equal_axes = false;
    int width = 860;
    int height = 560;
    /// Series values above this cap are clamped before plotting
    /// (blow-up curves are truncated at the guard radius).
    std::optional<double> y_cap;
    /// Vertical dashed marker, e.g. the estimated singularity time.
    std::optional<double> marker_x;
    std::string marker_label;
    /// key=value lines embedded as an XML comment for reproducibility.
    std::vector<std::string> metadata;
};

/// Self-contained SVG line plot: axes, ticks (decade ticks plus 2/5
/// mantissas in log mode), legend, optional marker. Nonpositive values
/// are dropped in log mode.
void write_svg_plot(const std::string& path, std::span<const PlotSeries> series,
                    const PlotOptions& opts);

}  // namespace ddelab
