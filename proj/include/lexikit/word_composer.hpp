#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "lexikit/boxes.hpp"
#include "lexikit/image.hpp"
#include "lexikit/letter_prep.hpp"
#include "lexikit/rng.hpp"

namespace lexikit {

struct MixtureConfig {
    double p_normal = 0.40;
    double p_reversal = 0.30;
    double p_corrected = 0.30;

    double prob(LetterClass c) const {
        switch (c) {
            case LetterClass::Normal: return p_normal;
            case LetterClass::Reversal: return p_reversal;
            default: return p_corrected;
        }
    }
};

// Per-letter augmentation, applied at placement so boxes stay exact. Off by
// default: detector-side training pipelines usually own augmentation, and the
// unaugmented composer gives analytically exact baseline behavior.
struct AugmentConfig {
    bool enabled = false;
    double rotation_deg = 5.0;    // rotation drawn from U(-r, +r)
    double translate_ratio = 0.1; // of base_letter_size, per axis
    double scale_delta = 0.2;     // scale drawn from U(1-d, 1+d)
};

struct ComposerConfig {
    int canvas_size = 640;
    int min_len = 2;
    int max_len = 7;
    int base_letter_size = 64;  // letters are upscaled from 32x32 at placement
    int gap_min = 18;           // horizontal gap between consecutive letter boxes
    int gap_max = 25;
    int margin = 8;
    MixtureConfig mixture;
    AugmentConfig augment;
    int words_per_image = 1;
    std::uint64_t rng_seed = 0;
    std::uint8_t bin_threshold = kDefaultBinThreshold;

    // Worst-case distance the augmented glyph can extend past its anchor;
    // gap_min must exceed this for ground-truth boxes to stay disjoint.
    double augment_overshoot() const;
    void validate() const;  // throws ConfigError with the offending field
};

struct WordScene {
    GrayImage canvas;
    std::vector<GroundTruthBox> boxes;  // ordered left-to-right by x
    std::int64_t scene_id = 0;
    std::uint64_t seed = 0;  // derived per-scene stream seed

    std::int64_t ink_pixels(std::uint8_t thr) const { return canvas.count_above(thr); }
};

using WordSpec = std::vector<std::pair<LetterClass, std::string>>;

// Draws word length uniform over [min_len, max_len], a class per slot from the
// mixture, and a letter id uniform over the pool's distinct letters of that
// class. Throws ConfigError when a class with positive probability has an
// empty pool.
WordSpec sample_word_spec(Rng& rng, const ComposerConfig& cfg, const LetterPool& pool);

// Upscales the sample to base_letter_size, applies the per-letter augmentation,
// and composites it onto the canvas by saturating max, clipped to its tight
// content box. anchor_x/baseline_y position the unaugmented glyph's bottom-left
// corner. Returns the tight box recomputed from the transformed pixels.
// Throws PlacementError after 10 failed attempts to fit the canvas.
GroundTruthBox place_letter(GrayImage& canvas, const LetterSample& sample, int anchor_x,
                            int baseline_y, const ComposerConfig& cfg, Rng& rng);

// Lays out one word left-to-right on a fresh canvas. Consecutive anchors
// advance by the previous tight box width plus a gap drawn from
// [gap_min, gap_max].
WordScene compose_word(const WordSpec& spec, const LetterPool& pool, const ComposerConfig& cfg,
                       Rng& rng);

// Scene i as a pure function of (pool, cfg, i): the per-scene stream is
// derive_seed(cfg.rng_seed, kStreamScene, i). Handles words_per_image > 1 by
// stacking word bands vertically.
WordScene compose_scene(const LetterPool& pool, const ComposerConfig& cfg, std::int64_t scene_id);

struct SplitFractions {
    double train = 0.8;
    double val = 0.2;
    double test = 0.0;
};

extern const char* const kSplitNames[3];  // "train", "val", "test"

// Deterministic split assignment: scene indices are ranked by
// derive_seed(seed, kStreamSplit, index) and per-split quotas are the
// largest-remainder apportionment of n * fraction, filled in rank order
// train, then val, then test. Exactly proportional for any n.
std::vector<int> assign_splits(std::uint64_t seed, std::int64_t n, const SplitFractions& split);

struct DatasetPaths {
    std::filesystem::path root;
    std::filesystem::path manifest;  // root/manifest.json
};

// Writes n_images scenes (image + label per scene) plus manifest.json under
// out_root. Scene generation is parallel over `workers` threads; output bytes
// do not depend on the worker count. Returns the dataset paths.
DatasetPaths generate_dataset(const LetterPool& pool, const ComposerConfig& cfg,
                              std::int64_t n_images, const SplitFractions& split,
                              const std::filesystem::path& out_root, int workers = 0);

}  // namespace lexikit
