#include "xplore/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "xplore/errors.hpp"
#include "xplore/experiment.hpp"

namespace xplore {

using nlohmann::json;
namespace fs = std::filesystem;

int Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

Histogram histogram(std::span<const double> values, int bins, double lo, double hi) {
    if (bins < 1) throw DomainError("histogram needs at least one bin");
    if (!(hi > lo)) throw DomainError("histogram range is empty");
    Histogram h{lo, hi, std::vector<int>(static_cast<std::size_t>(bins), 0)};
    for (double v : values) {
        int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
        b = std::clamp(b, 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

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

constexpr double kWidth = 480;
constexpr double kHeight = 320;
constexpr double kLeft = 50;
constexpr double kRight = 20;
constexpr double kTop = 36;
constexpr double kBottom = 48;

std::string open_svg(double w, double h, const std::string& title) {
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
      << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n"
      << "<text x=\"" << num(w / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << escape(title)
      << "</text>\n";
    return o.str();
}

const char* const kPalette[] = {"#3b6ea5", "#d9822b", "#4f9a5b", "#b5485d", "#7d5ba6", "#8c7a4b", "#5a5a5a"};

}  // namespace

std::string svg_histogram(const Histogram& h, const std::string& title, const std::string& x_label) {
    std::ostringstream o;
    o << open_svg(kWidth, kHeight, title);
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const int peak = std::max(1, h.counts.empty() ? 1 : *std::max_element(h.counts.begin(), h.counts.end()));
    const double bw = pw / static_cast<double>(h.counts.size());
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double bh = ph * h.counts[i] / peak;
        o << "<rect x=\"" << num(kLeft + bw * i) << "\" y=\"" << num(kTop + ph - bh) << "\" width=\"" << num(bw)
          << "\" height=\"" << num(bh) << "\" fill=\"" << kPalette[0] << "\" stroke=\"#ffffff\"><title>"
          << h.counts[i] << "</title></rect>\n";
    }
    o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
      << num(kTop + ph) << "\" stroke=\"#000000\"/>\n";
    o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
      << num(kTop + ph) << "\" stroke=\"#000000\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double x = kLeft + pw * k / 4.0;
        o << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 14) << "\" text-anchor=\"middle\">"
          << num(h.lo + (h.hi - h.lo) * k / 4.0) << "</text>\n";
    }
    o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(kTop + 4) << "\" text-anchor=\"end\">" << peak
      << "</text>\n";
    o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(kTop + ph) << "\" text-anchor=\"end\">0</text>\n";
    o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

std::string svg_heatmap(const std::array<int, kRegionCount>& counts, const std::string& title) {
    constexpr double cell = 40;
    constexpr double margin = 20;
    const double side = cell * kGridSize;
    std::ostringstream o;
    o << open_svg(side + 2 * margin, side + margin + kTop, title);
    const int peak = std::max(1, *std::max_element(counts.begin(), counts.end()));
    for (int r = 0; r < kGridSize; ++r) {
        for (int c = 0; c < kGridSize; ++c) {
            const int n = counts[static_cast<std::size_t>(r * kGridSize + c)];
            const double t = static_cast<double>(n) / peak;
            const int shade = static_cast<int>(std::lround(255.0 * (1.0 - t)));
            char fill[16];
            std::snprintf(fill, sizeof fill, "#%02x%02xff", shade, shade);
            o << "<rect x=\"" << num(margin + c * cell) << "\" y=\"" << num(kTop + r * cell) << "\" width=\""
              << num(cell) << "\" height=\"" << num(cell) << "\" fill=\"" << fill
              << "\" stroke=\"#999999\"><title>" << n << "</title></rect>\n";
        }
    }
    o << "</svg>\n";
    return o.str();
}

std::string svg_bar_chart(const std::vector<std::string>& categories, const std::vector<BarSeries>& series,
                          const std::string& title, double y_max) {
    std::ostringstream o;
    const double width = std::max(kWidth, kLeft + kRight + 70.0 * static_cast<double>(categories.size()));
    o << open_svg(width, kHeight, title);
    const double pw = width - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const double group_w = categories.empty() ? pw : pw / static_cast<double>(categories.size());
    const double bar_w = series.empty() ? group_w : group_w * 0.8 / static_cast<double>(series.size());
    for (std::size_t c = 0; c < categories.size(); ++c) {
        for (std::size_t s = 0; s < series.size(); ++s) {
            const double v = c < series[s].values.size() ? series[s].values[c] : 0.0;
            const double bh = ph * std::clamp(v / y_max, 0.0, 1.0);
            const double x = kLeft + group_w * c + group_w * 0.1 + bar_w * s;
            o << "<rect x=\"" << num(x) << "\" y=\"" << num(kTop + ph - bh) << "\" width=\"" << num(bar_w)
              << "\" height=\"" << num(bh) << "\" fill=\"" << kPalette[s % std::size(kPalette)] << "\"><title>"
              << escape(series[s].name) << ": " << num(v) << "</title></rect>\n";
        }
        o << "<text x=\"" << num(kLeft + group_w * (c + 0.5)) << "\" y=\"" << num(kTop + ph + 14)
          << "\" text-anchor=\"middle\">" << escape(categories[c]) << "</text>\n";
    }
    o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
      << num(kTop + ph) << "\" stroke=\"#000000\"/>\n";
    o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(kTop + 4) << "\" text-anchor=\"end\">" << num(y_max)
      << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const double x = kLeft + 110.0 * s;
        o << "<rect x=\"" << num(x) << "\" y=\"" << num(kHeight - 22) << "\" width=\"10\" height=\"10\" fill=\""
          << kPalette[s % std::size(kPalette)] << "\"/>\n";
        o << "<text x=\"" << num(x + 14) << "\" y=\"" << num(kHeight - 13) << "\">" << escape(series[s].name)
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

namespace {

struct GroupStats {
    std::vector<double> motivation;
    std::vector<double> novelty;
    double coverage = 0.0;
    double entropy = 0.0;
    double inspection = 0.0;
    int episodes = 0;
};

std::vector<fs::path> sorted_entries(const fs::path& dir, bool directories) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (directories ? e.is_directory() : e.is_regular_file()) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

json histogram_json(const Histogram& h) { return {{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}}; }

}  // namespace

ReportSummary write_report(const fs::path& in_dir, const fs::path& out_dir, const TileSet& tileset,
                           const EvalParams& eval) {
    std::map<std::string, Level> levels;
    for (const auto& p : sorted_entries(in_dir / "levels", false)) {
        if (p.extension() != ".json") continue;
        Level l = load_level(p, tileset);
        levels.emplace(l.id, std::move(l));
    }

    // group (preset) -> config -> stats
    std::map<std::string, std::map<std::string, GroupStats>> groups;
    std::vector<std::string> config_order;
    json heatmaps = json::array();
    ReportSummary summary;

    for (const auto& level_dir : sorted_entries(in_dir / "traces", true)) {
        for (const auto& p : sorted_entries(level_dir, false)) {
            if (p.extension() != ".jsonl") continue;
            const TraceLog trace = load_trace(p);
            const auto it = levels.find(trace.level_id);
            if (it == levels.end())
                throw StructuralError("trace " + p.string() + " refers to unknown level '" + trace.level_id + "'");
            const Level& level = it->second;
            const std::string group = level.preset.empty() ? "levels" : level.preset;
            if (std::find(config_order.begin(), config_order.end(), trace.config) == config_order.end())
                config_order.push_back(trace.config);

            GroupStats& g = groups[group][trace.config];
            if (!trace.is_random_control()) {
                for (const auto& d : trace.decisions) g.motivation.push_back(d.score.value_or(0.0));
            }
            const auto series = novelty_series(trace, level, eval.novelty);
            g.novelty.insert(g.novelty.end(), series.begin(), series.end());
            g.coverage += coverage(trace);
            g.entropy += entropy(trace, eval.entropy_normalization);
            g.inspection += inspection(trace, level, eval.inspect_radius);
            ++g.episodes;

            const auto counts = region_counts(trace);
            const fs::path rel = fs::path("heatmaps") / level.id / (p.stem().string() + ".svg");
            write_text_file(out_dir / rel, svg_heatmap(counts, level.id + " " + p.stem().string()));
            heatmaps.push_back({{"file", rel.generic_string()}, {"counts", counts}});
            ++summary.files;
            ++summary.traces;
        }
    }
    if (summary.traces == 0) throw StructuralError("no traces found under " + (in_dir / "traces").string());

    // Configs in the experiment order, unknown ones after.
    std::vector<std::string> order;
    for (const auto& name : ExperimentPlan::default_configs()) {
        if (std::find(config_order.begin(), config_order.end(), name) != config_order.end()) order.push_back(name);
    }
    for (const auto& name : config_order) {
        if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
    }

    json groups_json = json::object();
    for (const auto& [group, by_config] : groups) {
        json gj = json::object();
        for (const auto& [config, g] : by_config) {
            json cj = {{"episodes", g.episodes}};
            if (!g.motivation.empty() || config != TraceLog::kRandomConfig) {
                const Histogram h = histogram(g.motivation);
                const fs::path rel = fs::path("motivation") / (group + "__" + config + ".svg");
                write_text_file(out_dir / rel,
                                svg_histogram(h, "Motivation, " + group + ", " + config, "highest direction score"));
                cj["motivation"] = histogram_json(h);
                ++summary.files;
            }
            const Histogram hn = histogram(g.novelty);
            const fs::path rel = fs::path("novelty") / (group + "__" + config + ".svg");
            write_text_file(out_dir / rel, svg_histogram(hn, "Novelty, " + group + ", " + config, "novelty per tick"));
            cj["novelty"] = histogram_json(hn);
            ++summary.files;
            cj["coverage"] = g.coverage / g.episodes;
            cj["entropy"] = g.entropy / g.episodes;
            cj["inspection"] = g.inspection / g.episodes;
            gj[config] = cj;
        }
        groups_json[group] = gj;
    }

    json bars = json::object();
    for (const char* measure : {"coverage", "entropy", "inspection"}) {
        std::vector<BarSeries> series;
        for (const auto& [group, by_config] : groups) {
            BarSeries s{group, {}};
            for (const auto& config : order) {
                const auto it = by_config.find(config);
                s.values.push_back(it == by_config.end() ? 0.0 : groups_json[group][config][measure].get<double>());
            }
            series.push_back(std::move(s));
        }
        const std::string title = std::string("Average ") + measure;
        write_text_file(out_dir / "bars" / (std::string(measure) + ".svg"), svg_bar_chart(order, series, title));
        ++summary.files;
        json mj = json::object();
        for (const auto& s : series) mj[s.name] = s.values;
        bars[measure] = mj;
    }

    const json report = {{"format", "xplore-report/1"},
                         {"configs", order},
                         {"groups", groups_json},
                         {"bars", bars},
                         {"heatmaps", heatmaps}};
    write_text_file(out_dir / "report.json", report.dump(2) + "\n");
    ++summary.files;
    return summary;
}

}  // namespace xplore
