#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "xplore/tileset.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(XPLORE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("xplore_cli_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(Cli, GenerateEvaluateReport) {
    const fs::path dir = scratch("flow");
    ASSERT_EQ(run("generate --preset A --count 2 --seed 4 --out " + (dir / "levels").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "levels" / "A-4.json"));
    EXPECT_TRUE(fs::exists(dir / "levels" / "A-5.json"));
    EXPECT_EQ(run("validate-level " + (dir / "levels" / "A-4.json").string()), 0);
    ASSERT_EQ(run("evaluate --levels " + (dir / "levels").string() + " --duration 3 --spawns 2 --workers 2 --out " +
                  (dir / "out").string()),
              0);
    EXPECT_TRUE(fs::exists(dir / "out" / "summary.json"));
    EXPECT_EQ(run("report --in " + (dir / "out").string() + " --out " + (dir / "rep").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "rep" / "report.json"));
    fs::remove_all(dir);
}

TEST(Cli, UsageAndInputErrorsExitTwo) {
    const fs::path dir = scratch("errors");
    fs::create_directories(dir);
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("generate --preset C"), 2);
    EXPECT_EQ(run("evaluate"), 2);
    EXPECT_EQ(run("evaluate --levels " + (dir / "missing.json").string()), 2);
    std::ofstream(dir / "bad.json") << "{ not json";
    EXPECT_EQ(run("validate-level " + (dir / "bad.json").string()), 2);
    EXPECT_EQ(run("validate-tileset " + (dir / "bad.json").string()), 2);
    EXPECT_EQ(run("report --in " + (dir / "nowhere").string()), 2);
    fs::remove_all(dir);
}

TEST(Cli, MismatchedLevelExitsTwo) {
    const fs::path dir = scratch("mismatch");
    ASSERT_EQ(run("generate --count 1 --seed 1 --out " + dir.string()), 0);
    const fs::path file = dir / "A-1.json";
    std::ifstream in(file);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    in.close();
    // One highland tile in a field of meadows: its high edges meet low ones.
    int highland = -1;
    for (const auto& t : xplore::default_tileset().tiles())
        if (t.name == "highland") highland = t.id;
    ASSERT_GE(highland, 0);
    auto j = nlohmann::json::parse(text);
    for (auto& t : j["tiles"]) {
        t["tile_id"] = 0;
        t["rotation"] = 0;
    }
    j["tiles"][0]["tile_id"] = highland;
    std::ofstream(file) << j.dump();
    EXPECT_EQ(run("validate-level " + file.string()), 2);
    fs::remove_all(dir);
}

TEST(Cli, ExportedTilesetValidates) {
    const fs::path dir = scratch("tileset");
    fs::create_directories(dir);
    ASSERT_EQ(run("export-tileset --out " + (dir / "t.json").string()), 0);
    EXPECT_EQ(run("validate-tileset " + (dir / "t.json").string()), 0);
    fs::remove_all(dir);
}
