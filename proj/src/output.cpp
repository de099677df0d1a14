#include "eer/output.hpp"

#include "eer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace eer {

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= static_cast<uint64_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write_text(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string csv_table(const std::vector<std::string>& comment_lines,
                      const std::vector<std::string>& column_names,
                      const std::vector<Eigen::VectorXd>& columns) {
    if (columns.empty() || column_names.size() != columns.size())
        throw error("csv_table: column names and columns must match");
    const Eigen::Index rows = columns[0].size();
    for (const auto& c : columns)
        if (c.size() != rows) throw error("csv_table: ragged columns");

    std::string s;
    for (const auto& line : comment_lines) {
        s += "# ";
        s += line;
        s += "\n";
    }
    s += "# ";
    for (size_t j = 0; j < column_names.size(); ++j) {
        if (j) s += ",";
        s += column_names[j];
    }
    s += "\n";
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (size_t j = 0; j < columns.size(); ++j) {
            if (j) s += ",";
            s += format_g17(columns[j](i));
        }
        s += "\n";
    }
    return s;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt_tick(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string fmt_px(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const Eigen::VectorXd& x,
                          const std::vector<PlotSeries>& series,
                          const std::string& hash_comment) {
    const double W = 960, H = 540;
    const double ml = 72, mr = 24, mt = 40, mb = 52;
    const double pw = W - ml - mr, ph = H - mt - mb;

    double xmin = x.minCoeff(), xmax = x.maxCoeff();
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -ymin;
    for (const auto& s : series) {
        if (s.y.size() != x.size()) throw error("svg_line_plot: series length mismatch");
        ymin = std::min(ymin, s.y.minCoeff());
        ymax = std::max(ymax, s.y.maxCoeff());
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return mt + (ymax - v) / (ymax - ymin) * ph; };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"540\" "
         "viewBox=\"0 0 960 540\">\n";
    s += "<!-- " + hash_comment + " -->\n";
    s += "<rect width=\"960\" height=\"540\" fill=\"white\"/>\n";
    s += "<rect x=\"" + fmt_px(ml) + "\" y=\"" + fmt_px(mt) + "\" width=\"" + fmt_px(pw) +
         "\" height=\"" + fmt_px(ph) + "\" fill=\"none\" stroke=\"#333\"/>\n";
    s += "<text x=\"" + fmt_px(W / 2) +
         "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" "
         "text-anchor=\"middle\">" +
         title + "</text>\n";
    s += "<text x=\"" + fmt_px(ml + pw / 2) + "\" y=\"" + fmt_px(H - 12) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" +
         x_label + "</text>\n";

    const int nticks = 5;
    for (int i = 0; i <= nticks; ++i) {
        const double fx = xmin + (xmax - xmin) * i / nticks;
        const double fy = ymin + (ymax - ymin) * i / nticks;
        const double tx = px(fx), ty = py(fy);
        s += "<line x1=\"" + fmt_px(tx) + "\" y1=\"" + fmt_px(mt + ph) + "\" x2=\"" +
             fmt_px(tx) + "\" y2=\"" + fmt_px(mt + ph + 5) + "\" stroke=\"#333\"/>\n";
        s += "<text x=\"" + fmt_px(tx) + "\" y=\"" + fmt_px(mt + ph + 18) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
             fmt_tick(fx) + "</text>\n";
        s += "<line x1=\"" + fmt_px(ml - 5) + "\" y1=\"" + fmt_px(ty) + "\" x2=\"" +
             fmt_px(ml) + "\" y2=\"" + fmt_px(ty) + "\" stroke=\"#333\"/>\n";
        s += "<text x=\"" + fmt_px(ml - 8) + "\" y=\"" + fmt_px(ty + 4) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
             fmt_tick(fy) + "</text>\n";
    }

    // downsample long series; plots are a convenience, the CSV is the record
    const Eigen::Index n = x.size();
    const Eigen::Index stride = std::max<Eigen::Index>(1, (n + 1999) / 2000);

    for (size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % 6];
        s += "<polyline fill=\"none\" stroke=\"";
        s += color;
        s += "\" stroke-width=\"1.3\" points=\"";
        for (Eigen::Index i = 0; i < n; i += stride) {
            s += fmt_px(px(x(i)));
            s += ",";
            s += fmt_px(py(series[si].y(i)));
            s += " ";
        }
        if ((n - 1) % stride != 0) {
            s += fmt_px(px(x(n - 1)));
            s += ",";
            s += fmt_px(py(series[si].y(n - 1)));
        }
        s += "\"/>\n";
        s += "<text x=\"" + fmt_px(W - mr - 8) + "\" y=\"" +
             fmt_px(mt + 18 + 16 * static_cast<double>(si)) +
             "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\" fill=\"";
        s += color;
        s += "\">" + series[si].label + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace eer
