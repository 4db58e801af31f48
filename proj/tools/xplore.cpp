// xplore: level generation, exploratory-agent evaluation and reporting.
//
// Exit codes: 0 success, 1 simulation failure, 2 usage or input error.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "xplore/errors.hpp"
#include "xplore/experiment.hpp"
#include "xplore/report.hpp"
#include "xplore/tileset.hpp"
#include "xplore/wfc.hpp"
#include "xplore/world.hpp"

namespace fs = std::filesystem;
using namespace xplore;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSimulation = 1;
constexpr int kExitInput = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

TileSet tileset_or_default(const std::string& path) {
    if (path.empty()) return default_tileset();
    if (!fs::is_regular_file(path)) throw InputError("tileset not found: " + path);
    return load_tileset(path);
}

Settings settings_or_default(const std::string& path) {
    if (path.empty()) return {};
    if (!fs::is_regular_file(path)) throw InputError("config not found: " + path);
    return load_settings(path);
}

std::vector<fs::path> expand_levels(const std::vector<std::string>& refs) {
    std::vector<fs::path> out;
    for (const auto& r : refs) {
        const fs::path p(r);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(p)) {
                if (e.is_regular_file() && e.path().extension() == ".json") found.push_back(e.path());
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else if (fs::is_regular_file(p)) {
            out.push_back(p);
        } else {
            throw InputError("level not found: " + r);
        }
    }
    if (out.empty()) throw InputError("no level files given");
    return out;
}

void print_offenses(const ValidationError& e) {
    for (const auto& o : e.offenses()) {
        std::cerr << "  (" << o.row << "," << o.col << ") vs (" << o.neighbor_row << "," << o.neighbor_col
                  << "): " << o.reason << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Procedural level generation and exploratory-agent evaluation"};
    app.require_subcommand(1);

    std::string tileset_path;
    std::string config_path;

    // generate
    auto* gen = app.add_subcommand("generate", "Generate levels with the WFC generator");
    std::string preset_arg = "A";
    int count = 1;
    std::uint64_t seed = 1;
    std::string out = "levels";
    gen->add_option("--preset", preset_arg, "Weight preset (A or B)")->check(CLI::IsMember({"A", "B"}));
    gen->add_option("--count", count, "Number of levels")->check(CLI::PositiveNumber);
    gen->add_option("--seed", seed, "Seed of the first level; level i uses seed + i");
    gen->add_option("--out", out, "Output directory");
    gen->add_option("--tileset", tileset_path, "Tileset JSON (defaults to the built-in tileset)");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Run the metric x spawn battery and compute fitness");
    std::vector<std::string> level_refs;
    std::uint64_t master_seed = 1;
    int spawns = 3;
    std::optional<double> duration;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string eval_out = "results";
    ev->add_option("--levels", level_refs, "Level files or directories")->required();
    ev->add_option("--seed", master_seed, "Master seed");
    ev->add_option("--spawns", spawns, "Spawn points per level")->check(CLI::PositiveNumber);
    ev->add_option("--duration", duration, "Simulated seconds per episode");
    ev->add_option("--workers", workers, "Concurrent episodes")->check(CLI::PositiveNumber);
    ev->add_option("--out", eval_out, "Output directory");
    ev->add_option("--tileset", tileset_path, "Tileset JSON (defaults to the built-in tileset)");
    ev->add_option("--config", config_path, "Experiment config JSON");

    // report
    auto* rep = app.add_subcommand("report", "Render histograms, heatmaps and bar charts from an evaluate run");
    std::string in_dir;
    std::string report_out = "report";
    rep->add_option("--in", in_dir, "Directory written by evaluate")->required();
    rep->add_option("--out", report_out, "Output directory");
    rep->add_option("--tileset", tileset_path, "Tileset JSON (defaults to the built-in tileset)");
    rep->add_option("--config", config_path, "Experiment config JSON");

    // validation
    auto* vl = app.add_subcommand("validate-level", "Check a level file against a tileset");
    std::string level_file;
    vl->add_option("level", level_file, "Level JSON")->required();
    vl->add_option("--tileset", tileset_path, "Tileset JSON (defaults to the built-in tileset)");

    auto* vt = app.add_subcommand("validate-tileset", "Check a tileset file");
    std::string tileset_file;
    vt->add_option("tileset", tileset_file, "Tileset JSON")->required();

    auto* et = app.add_subcommand("export-tileset", "Write the built-in tileset as JSON");
    std::string export_path = "default_tileset.json";
    et->add_option("--out", export_path, "Output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (gen->parsed()) {
            const TileSet ts = tileset_or_default(tileset_path);
            const Preset preset = parse_preset(preset_arg);
            fs::create_directories(out);
            for (int i = 0; i < count; ++i) {
                const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
                Level level = generate_level(ts, preset, s);
                level.tileset_ref = tileset_path.empty() ? "builtin:default" : tileset_path;
                const fs::path file = fs::path(out) / (level.id + ".json");
                save_level(level, file);
                std::cout << level.id << "\tobjects=" << level.objects.size() << "\t" << file.string() << "\n";
            }
            return kExitOk;
        }

        if (ev->parsed()) {
            const TileSet ts = tileset_or_default(tileset_path);
            ExperimentPlan plan;
            plan.settings = settings_or_default(config_path);
            if (duration) {
                plan.settings.agent.sim_duration = *duration;
                plan.settings.agent.validate();
            }
            for (const auto& p : expand_levels(level_refs)) plan.levels.push_back(load_level(p, ts));
            plan.configs = ExperimentPlan::default_configs();
            plan.spawns_per_level = spawns;
            plan.master_seed = master_seed;
            plan.workers = workers;
            const auto t0 = std::chrono::steady_clock::now();
            const ExperimentResult result = run_experiment(plan, fs::path(eval_out));
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            for (const auto& l : result.levels) {
                std::cout << l.level_id << "\t";
                if (l.report) std::cout << "F=" << l.report->F << "\n";
                else std::cout << "PARTIAL: " << l.error << "\n";
            }
            std::cerr << "evaluated " << plan.levels.size() << " levels in " << secs << " s\n";
            return result.ok() ? kExitOk : kExitSimulation;
        }

        if (rep->parsed()) {
            const TileSet ts = tileset_or_default(tileset_path);
            const Settings settings = settings_or_default(config_path);
            if (!fs::is_directory(in_dir)) throw InputError("input directory not found: " + in_dir);
            const ReportSummary s = write_report(in_dir, report_out, ts, settings.eval);
            std::cout << "read " << s.traces << " traces, wrote " << s.files << " files to " << report_out << "\n";
            return kExitOk;
        }

        if (vl->parsed()) {
            const TileSet ts = tileset_or_default(tileset_path);
            const Level level = load_level(level_file, ts);
            std::cout << level.id << ": ok, " << level.objects.size() << " objects, " << level.nav.walkable_count()
                      << " walkable cells\n";
            return kExitOk;
        }

        if (vt->parsed()) {
            if (!fs::is_regular_file(tileset_file)) throw InputError("tileset not found: " + tileset_file);
            const TileSet ts = load_tileset(tileset_file);
            std::cout << tileset_file << ": ok, " << ts.tiles().size() << " tiles\n";
            return kExitOk;
        }

        if (et->parsed()) {
            save_tileset(default_tileset(), export_path);
            std::cout << "wrote " << export_path << "\n";
            return kExitOk;
        }
    } catch (const ValidationError& e) {
        std::cerr << "invalid: " << e.what() << "\n";
        print_offenses(e);
        return kExitInput;
    } catch (const ContradictionError& e) {
        std::cerr << "generation failed: " << e.what() << "\n";
        return kExitSimulation;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const StructuralError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return kExitSimulation;
    }
    return kExitInput;
}
