#pragma once

// Artifact emission: hashed headers, 17-significant-digit CSV, a minimal
// SVG line plotter, and atomic file writes.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace eer {

uint64_t fnv1a64(std::string_view s);

std::string format_g17(double v);

// tmp-file + rename so partially written artifacts never appear
void atomic_write_text(const std::string& path, const std::string& content);

std::string csv_table(const std::vector<std::string>& comment_lines,
                      const std::vector<std::string>& column_names,
                      const std::vector<Eigen::VectorXd>& columns);

struct PlotSeries {
    std::string label;
    Eigen::VectorXd y;
};

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const Eigen::VectorXd& x,
                          const std::vector<PlotSeries>& series,
                          const std::string& hash_comment);

}  // namespace eer
