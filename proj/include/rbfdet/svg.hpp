#ifndef RBFDET_SVG_HPP
#define RBFDET_SVG_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace rbfdet {

struct ChartSeries {
    std::string label;
    std::string color;  // CSS color, e.g. "#d62728"
    std::vector<std::pair<double, double>> points;
};

/// Writes a self-contained SVG line chart (no external references).
/// Axis ranges and ticks are derived from the data; output bytes are a
/// pure function of the arguments.
void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<ChartSeries>& series);

} // namespace rbfdet

#endif
