#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lexikit/glyph_synth.hpp"
#include "lexikit/letter_prep.hpp"
#include "lexikit/png_io.hpp"

using namespace lexikit;
namespace fs = std::filesystem;

#ifndef LEXIKIT_CLI_PATH
#define LEXIKIT_CLI_PATH "lexikit"
#endif

namespace {

struct RunResult {
    int exit_code;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args, const fs::path& cwd) {
    const fs::path log = cwd / "cli_log.txt";
    const std::string cmd = "cd " + cwd.string() + " && " + LEXIKIT_CLI_PATH + " " + args + " > " +
                            log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    fs::remove(log);
    return {WEXITSTATUS(status), ss.str()};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lexikit_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("prep succeeds on a valid three-folder corpus and prints counts") {
    const fs::path dir = fresh_dir("prep_ok");
    GrayImage glyph(8, 8, 0);
    for (int i = 2; i <= 5; ++i) {
        glyph.at(i, 3) = 255;
        glyph.at(3, i) = 255;
    }
    for (const char* cls : {"Normal", "Reversal", "Corrected"}) {
        fs::create_directories(dir / "letters" / cls);
        write_png_gray(dir / "letters" / cls / "a_0.png", glyph);
        write_png_gray(dir / "letters" / cls / "a_1.png", glyph);
    }
    {
        std::ofstream bad(dir / "letters" / "Normal" / "corrupt.png");
        bad << "not a png";
    }
    const RunResult r = run_cli("prep --input letters --output normalized", dir);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("Normal: 2") != std::string::npos);
    CHECK(r.output.find("skipped: 1") != std::string::npos);
    CHECK(fs::exists(dir / "normalized" / "Reversal" / "a_0001.png"));
    fs::remove_all(dir);
}

TEST_CASE("prep exits 2 and names a missing class directory") {
    const fs::path dir = fresh_dir("prep_missing");
    fs::create_directories(dir / "letters" / "Normal");
    fs::create_directories(dir / "letters" / "Corrected");
    const RunResult r = run_cli("prep --input letters", dir);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("Reversal") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("synth writes a pool plus the effective config") {
    const fs::path dir = fresh_dir("synth");
    const RunResult r = run_cli("synth --seed 9 --per-class 4 --out pool", dir);
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "pool" / "Normal"));
    CHECK(fs::exists(dir / "pool" / "effective_config.json"));
    int pngs = 0;
    for (const auto& e : fs::directory_iterator(dir / "pool" / "Corrected"))
        pngs += e.path().extension() == ".png";
    CHECK(pngs == 4);
    fs::remove_all(dir);
}

TEST_CASE("an unreadable config file exits 2") {
    const fs::path dir = fresh_dir("badcfg");
    const RunResult r = run_cli("synth --config nope.json --out pool", dir);
    CHECK(r.exit_code == 2);
    fs::remove_all(dir);
}

TEST_CASE("a malformed config file exits 2") {
    const fs::path dir = fresh_dir("badjson");
    {
        std::ofstream f(dir / "cfg.json");
        f << "{ not json";
    }
    const RunResult r = run_cli("synth --config cfg.json --out pool", dir);
    CHECK(r.exit_code == 2);
    fs::remove_all(dir);
}

TEST_CASE("config file fields drive composition") {
    const fs::path dir = fresh_dir("cfgdrive");
    {
        std::ofstream f(dir / "cfg.json");
        f << R"({"seed": 3, "synth": {"per_class_count": 6},
               "compose": {"n_images": 5, "split": [1.0, 0.0, 0.0], "min_len": 2, "max_len": 3}})";
    }
    const RunResult r = run_cli("compose --config cfg.json --out ds", dir);
    CHECK(r.exit_code == 0);
    int images = 0;
    for (const auto& e : fs::directory_iterator(dir / "ds" / "images" / "train"))
        images += e.path().extension() == ".png";
    CHECK(images == 5);
    CHECK(fs::exists(dir / "ds" / "manifest.json"));
    CHECK(fs::exists(dir / "ds" / "effective_config.json"));
    fs::remove_all(dir);
}

TEST_CASE("eval exits 1 when the manifest is missing") {
    const fs::path dir = fresh_dir("noman");
    const RunResult r = run_cli("eval --manifest missing.json --predictions preds", dir);
    CHECK(r.exit_code == 1);
    fs::remove_all(dir);
}

TEST_CASE("mini pipeline scores perfectly and report re-renders") {
    const fs::path dir = fresh_dir("mini");
    CHECK(run_cli("synth --seed 4 --per-class 8 --out pool", dir).exit_code == 0);
    CHECK(run_cli("compose --seed 4 --pool pool --n-images 12 --out ds", dir).exit_code == 0);
    CHECK(run_cli("detect --manifest ds/manifest.json --templates pool --split val --out preds",
                  dir).exit_code == 0);
    const RunResult ev =
        run_cli("eval --manifest ds/manifest.json --predictions preds --split val --out rep.json",
                dir);
    CHECK(ev.exit_code == 0);
    CHECK(ev.output.find("mAP@0.5") != std::string::npos);
    const RunResult rep = run_cli("report --report rep.json", dir);
    CHECK(rep.exit_code == 0);
    CHECK(rep.output.find("Class") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("unknown flags exit 2") {
    const fs::path dir = fresh_dir("badflag");
    CHECK(run_cli("synth --out pool --frobnicate", dir).exit_code == 2);
    fs::remove_all(dir);
}
