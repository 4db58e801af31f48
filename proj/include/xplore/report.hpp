#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "xplore/eval.hpp"

namespace xplore {

struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<int> counts;

    int total() const;
};

// Equal-width bins over [lo, hi); values at or beyond hi land in the last
// bin and values below lo in the first.
Histogram histogram(std::span<const double> values, int bins = 20, double lo = 0.0, double hi = 1.0);

std::string svg_histogram(const Histogram& h, const std::string& title, const std::string& x_label);

// 7x7 region grid, row 0 at the top (north); shade proportional to count.
std::string svg_heatmap(const std::array<int, kRegionCount>& counts, const std::string& title);

struct BarSeries {
    std::string name;
    std::vector<double> values;  // one per category
};

std::string svg_bar_chart(const std::vector<std::string>& categories, const std::vector<BarSeries>& series,
                          const std::string& title, double y_max = 1.0);

struct ReportSummary {
    int traces = 0;
    int files = 0;
};

/// Read an evaluate output directory (levels/ and traces/) and write
/// motivation and novelty histograms per preset and config, a heatmap per
/// trace, and coverage / entropy / inspection bar charts per preset, plus
/// report.json holding every plotted number. Throws StructuralError when
/// no traces are found.
ReportSummary write_report(const std::filesystem::path& in_dir, const std::filesystem::path& out_dir,
                           const TileSet& tileset, const EvalParams& eval = {});

}  // namespace xplore
