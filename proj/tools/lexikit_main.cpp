// lexikit: synthetic dyslexia-handwriting scenes and detection scoring.
//
// Subcommands: prep, synth, compose, detect, eval, report.
// Exit codes: 0 success, 1 runtime error, 2 configuration error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lexikit/annotation_io.hpp"
#include "lexikit/baseline_detector.hpp"
#include "lexikit/errors.hpp"
#include "lexikit/eval.hpp"
#include "lexikit/glyph_synth.hpp"
#include "lexikit/letter_prep.hpp"
#include "lexikit/version.hpp"
#include "lexikit/word_composer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lexikit;

namespace {

struct ToolConfig {
    std::uint64_t master_seed = 0;
    SynthConfig synth;
    int per_class_count = 64;
    ComposerConfig compose;
    std::int64_t n_images = 200;
    SplitFractions split{0.8, 0.2, 0.0};
    DetectorParams detector;
    std::string detect_split = "val";
    EvalConfig eval;
    std::string eval_split = "val";
};

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

ToolConfig load_config(const std::string& path) {
    ToolConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    try {
        maybe(j, "seed", cfg.master_seed);
        if (j.contains("synth")) {
            const json& s = j.at("synth");
            maybe(s, "alphabet", cfg.synth.alphabet);
            maybe(s, "per_class_count", cfg.per_class_count);
            maybe(s, "jitter_px", cfg.synth.jitter_px);
            if (s.contains("width_range")) {
                cfg.synth.width_min = s.at("width_range").at(0).get<double>();
                cfg.synth.width_max = s.at("width_range").at(1).get<double>();
            }
            maybe(s, "correction_ghost_alpha", cfg.synth.correction_ghost_alpha);
            maybe(s, "artifact_probability", cfg.synth.artifact_probability);
            if (s.contains("overdraw_strokes")) {
                cfg.synth.overdraw_min = s.at("overdraw_strokes").at(0).get<int>();
                cfg.synth.overdraw_max = s.at("overdraw_strokes").at(1).get<int>();
            }
            maybe(s, "render_size", cfg.synth.render_size);
        }
        if (j.contains("compose")) {
            const json& c = j.at("compose");
            maybe(c, "canvas_size", cfg.compose.canvas_size);
            maybe(c, "min_len", cfg.compose.min_len);
            maybe(c, "max_len", cfg.compose.max_len);
            maybe(c, "base_letter_size", cfg.compose.base_letter_size);
            if (c.contains("gap_range")) {
                cfg.compose.gap_min = c.at("gap_range").at(0).get<int>();
                cfg.compose.gap_max = c.at("gap_range").at(1).get<int>();
            }
            maybe(c, "margin", cfg.compose.margin);
            if (c.contains("mixture")) {
                cfg.compose.mixture.p_normal = c.at("mixture").at(0).get<double>();
                cfg.compose.mixture.p_reversal = c.at("mixture").at(1).get<double>();
                cfg.compose.mixture.p_corrected = c.at("mixture").at(2).get<double>();
            }
            if (c.contains("augment")) {
                const json& a = c.at("augment");
                maybe(a, "enabled", cfg.compose.augment.enabled);
                maybe(a, "rotation_deg", cfg.compose.augment.rotation_deg);
                maybe(a, "translate_ratio", cfg.compose.augment.translate_ratio);
                maybe(a, "scale_delta", cfg.compose.augment.scale_delta);
            }
            maybe(c, "words_per_image", cfg.compose.words_per_image);
            maybe(c, "n_images", cfg.n_images);
            if (c.contains("split")) {
                cfg.split.train = c.at("split").at(0).get<double>();
                cfg.split.val = c.at("split").at(1).get<double>();
                cfg.split.test = c.at("split").at(2).get<double>();
            }
            int thr = cfg.compose.bin_threshold;
            maybe(c, "bin_threshold", thr);
            cfg.compose.bin_threshold = static_cast<std::uint8_t>(thr);
        }
        if (j.contains("detect")) {
            const json& d = j.at("detect");
            int thr = cfg.detector.bin_threshold;
            maybe(d, "bin_threshold", thr);
            cfg.detector.bin_threshold = static_cast<std::uint8_t>(thr);
            maybe(d, "min_component_area", cfg.detector.min_component_area);
            maybe(d, "split", cfg.detect_split);
        }
        if (j.contains("eval")) {
            const json& e = j.at("eval");
            maybe(e, "conf_threshold", cfg.eval.conf_threshold);
            maybe(e, "report_best_f1", cfg.eval.report_best_f1);
            if (e.contains("iou_thresholds"))
                cfg.eval.iou_thresholds = e.at("iou_thresholds").get<std::vector<double>>();
            maybe(e, "split", cfg.eval_split);
        }
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    return cfg;
}

json synth_to_json(const SynthConfig& s, int per_class) {
    return {{"alphabet", s.alphabet},
            {"per_class_count", per_class},
            {"jitter_px", s.jitter_px},
            {"width_range", {s.width_min, s.width_max}},
            {"correction_ghost_alpha", s.correction_ghost_alpha},
            {"artifact_probability", s.artifact_probability},
            {"overdraw_strokes", {s.overdraw_min, s.overdraw_max}},
            {"render_size", s.render_size},
            {"rng_seed", s.rng_seed}};
}

json compose_to_json(const ComposerConfig& c, std::int64_t n, const SplitFractions& split) {
    return {{"canvas_size", c.canvas_size},
            {"min_len", c.min_len},
            {"max_len", c.max_len},
            {"base_letter_size", c.base_letter_size},
            {"gap_range", {c.gap_min, c.gap_max}},
            {"margin", c.margin},
            {"mixture", {c.mixture.p_normal, c.mixture.p_reversal, c.mixture.p_corrected}},
            {"augment",
             {{"enabled", c.augment.enabled},
              {"rotation_deg", c.augment.rotation_deg},
              {"translate_ratio", c.augment.translate_ratio},
              {"scale_delta", c.augment.scale_delta}}},
            {"words_per_image", c.words_per_image},
            {"bin_threshold", int(c.bin_threshold)},
            {"n_images", n},
            {"split", {split.train, split.val, split.test}},
            {"rng_seed", c.rng_seed}};
}

// The effective configuration is echoed to stdout and written next to the
// artifacts so any output directory can be regenerated byte-identically.
void echo_config(const json& effective, const fs::path& out_dir) {
    const std::string text = effective.dump(2) + "\n";
    std::cout << text;
    std::ofstream out(out_dir / "effective_config.json", std::ios::binary);
    if (!out) throw IoError("cannot write effective_config.json under " + out_dir.string());
    out << text;
}

int cmd_prep(const std::string& input, const std::string& output, int bin_threshold) {
    const LetterPool pool = load_letter_pool(input, static_cast<std::uint8_t>(bin_threshold));
    if (!output.empty()) {
        fs::create_directories(output);
        export_pool(pool, output);
    }
    std::cout << "Normal: " << pool.count(LetterClass::Normal)
              << "\nReversal: " << pool.count(LetterClass::Reversal)
              << "\nCorrected: " << pool.count(LetterClass::Corrected)
              << "\nskipped: " << pool.skipped << "\n";
    return 0;
}

int cmd_synth(ToolConfig cfg, const std::string& out) {
    cfg.synth.rng_seed = cfg.master_seed;
    const LetterPool pool = synth_pool(cfg.synth, cfg.per_class_count);
    fs::create_directories(out);
    export_pool(pool, out);
    json effective = {{"tool_version", kVersion},
                      {"master_seed", cfg.master_seed},
                      {"synth", synth_to_json(cfg.synth, cfg.per_class_count)}};
    echo_config(effective, out);
    std::cout << "pool written to " << out << " (" << pool.count(LetterClass::Normal)
              << " per class)\n";
    return 0;
}

LetterPool pool_for(const ToolConfig& cfg, const std::string& pool_dir) {
    if (!pool_dir.empty()) return load_letter_pool(pool_dir);
    SynthConfig s = cfg.synth;
    s.rng_seed = cfg.master_seed;
    return synth_pool(s, cfg.per_class_count);
}

int cmd_compose(ToolConfig cfg, const std::string& pool_dir, const std::string& out, int workers) {
    cfg.compose.rng_seed = cfg.master_seed;
    const LetterPool pool = pool_for(cfg, pool_dir);
    const DatasetPaths paths = generate_dataset(pool, cfg.compose, cfg.n_images, cfg.split, out,
                                                workers);
    json effective = {{"tool_version", kVersion},
                      {"master_seed", cfg.master_seed},
                      {"compose", compose_to_json(cfg.compose, cfg.n_images, cfg.split)}};
    if (pool_dir.empty())
        effective["synth"] = synth_to_json(cfg.synth, cfg.per_class_count);
    else
        effective["pool_dir"] = pool_dir;
    echo_config(effective, out);
    std::cout << "dataset written to " << paths.root << "\n";
    return 0;
}

int cmd_detect(ToolConfig cfg, const std::string& manifest_path, const std::string& templates_dir,
               const std::string& out, int workers) {
    const DatasetManifest manifest = read_manifest(manifest_path);
    manifest.validate();
    LetterPool pool;
    if (!templates_dir.empty()) {
        pool = load_letter_pool(templates_dir);
    } else {
        SynthConfig s = cfg.synth;
        s.rng_seed = cfg.master_seed;
        pool = synth_pool(s, cfg.per_class_count);
    }
    const TemplateBank bank = TemplateBank::from_pool(pool);
    if (!bank.valid()) throw ConfigError("template source has an empty class");
    fs::create_directories(out);
    detect_dataset(manifest, cfg.detect_split, bank, cfg.detector, out, workers);
    json effective = {{"tool_version", kVersion},
                      {"master_seed", cfg.master_seed},
                      {"detect",
                       {{"bin_threshold", int(cfg.detector.bin_threshold)},
                        {"min_component_area", cfg.detector.min_component_area},
                        {"split", cfg.detect_split},
                        {"manifest", manifest_path},
                        {"templates", templates_dir}}}};
    echo_config(effective, out);
    std::cout << "predictions written to " << out << "/" << cfg.detect_split << "\n";
    return 0;
}

int cmd_eval(const ToolConfig& cfg, const std::string& manifest_path, const std::string& preds,
             const std::string& out_json) {
    const DatasetManifest manifest = read_manifest(manifest_path);
    const EvalReport report = evaluate(manifest, preds, cfg.eval_split, cfg.eval);
    std::cout << render_report_table(report);
    if (!out_json.empty()) {
        write_report_json(report, out_json);
        std::cout << "report written to " << out_json << "\n";
    }
    return 0;
}

int cmd_report(const std::string& report_path) {
    std::cout << render_report_table(read_report_json(report_path));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic dyslexia-handwriting scenes and detection scoring"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();  // allow --config/--seed after the subcommand name

    std::string config_path;
    std::uint64_t seed_flag = 0;
    bool seed_given = false;
    app.add_option("--config", config_path, "JSON config file with per-subcommand sections")
        ->envname("LEXIKIT_CONFIG");

    auto add_seed = [&](CLI::App* sub) {
        sub->add_option("--seed", seed_flag, "master seed (overrides config)")
            ->each([&](const std::string&) { seed_given = true; });
    };

    // prep
    auto* prep = app.add_subcommand("prep", "normalize a letter corpus into 32x32 samples");
    std::string prep_in, prep_out;
    int prep_thr = kDefaultBinThreshold;
    prep->add_option("--input", prep_in, "directory with Normal/ Reversal/ Corrected/ folders")
        ->required();
    prep->add_option("--output", prep_out, "directory for normalized samples");
    prep->add_option("--bin-threshold", prep_thr, "content threshold (default 128)");

    // synth
    auto* synth = app.add_subcommand("synth", "synthesize a letter pool");
    std::string synth_out;
    int per_class_flag = -1;
    synth->add_option("--out", synth_out, "output pool directory")->required();
    synth->add_option("--per-class", per_class_flag, "samples per class");
    add_seed(synth);

    // compose
    auto* compose = app.add_subcommand("compose", "compose word scenes with ground truth");
    std::string compose_pool, compose_out;
    std::int64_t n_images_flag = -1;
    int workers = 0;
    compose->add_option("--pool", compose_pool, "letter pool directory (default: synthesize)");
    compose->add_option("--out", compose_out, "dataset output directory")->required();
    compose->add_option("--n-images", n_images_flag, "number of scenes");
    compose->add_option("--workers", workers, "worker threads (default: hardware)");
    add_seed(compose);

    // detect
    auto* detect_cmd = app.add_subcommand("detect", "run the baseline detector over a split");
    std::string det_manifest, det_templates, det_out, det_split_flag;
    detect_cmd->add_option("--manifest", det_manifest, "dataset manifest.json")->required();
    detect_cmd->add_option("--templates", det_templates,
                           "template pool directory (default: synthesize from config)");
    detect_cmd->add_option("--out", det_out, "predictions output root")->required();
    detect_cmd->add_option("--split", det_split_flag, "split to run (train/val/test)");
    detect_cmd->add_option("--workers", workers, "worker threads (default: hardware)");
    add_seed(detect_cmd);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "score predictions against ground truth");
    std::string eval_manifest, eval_preds, eval_out, eval_split_flag;
    eval_cmd->add_option("--manifest", eval_manifest, "dataset manifest.json")->required();
    eval_cmd->add_option("--predictions", eval_preds, "predictions root")->required();
    eval_cmd->add_option("--split", eval_split_flag, "split to score (train/val/test)");
    eval_cmd->add_option("--out", eval_out, "write report JSON here");

    // report
    auto* report_cmd = app.add_subcommand("report", "re-render a saved report");
    std::string report_path;
    report_cmd->add_option("--report", report_path, "report.json path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ToolConfig cfg = load_config(config_path);
        if (seed_given) cfg.master_seed = seed_flag;
        if (per_class_flag > 0) cfg.per_class_count = per_class_flag;
        if (n_images_flag >= 0) cfg.n_images = n_images_flag;
        if (!det_split_flag.empty()) cfg.detect_split = det_split_flag;
        if (!eval_split_flag.empty()) cfg.eval_split = eval_split_flag;

        if (prep->parsed()) return cmd_prep(prep_in, prep_out, prep_thr);
        if (synth->parsed()) return cmd_synth(cfg, synth_out);
        if (compose->parsed()) return cmd_compose(cfg, compose_pool, compose_out, workers);
        if (detect_cmd->parsed())
            return cmd_detect(cfg, det_manifest, det_templates, det_out, workers);
        if (eval_cmd->parsed()) return cmd_eval(cfg, eval_manifest, eval_preds, eval_out);
        if (report_cmd->parsed()) return cmd_report(report_path);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
