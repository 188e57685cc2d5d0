#include "lexikit/word_composer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <thread>

#include "lexikit/annotation_io.hpp"
#include "lexikit/errors.hpp"
#include "lexikit/png_io.hpp"
#include "lexikit/version.hpp"

namespace lexikit {

namespace fs = std::filesystem;

const char* const kSplitNames[3] = {"train", "val", "test"};

namespace {

constexpr double kPi = 3.14159265358979323846;

struct TightBox {
    int min_x = 0, min_y = 0, max_x = -1, max_y = -1;
    bool empty() const { return max_x < min_x; }
};

TightBox tight_box(const GrayImage& img, std::uint8_t thr) {
    TightBox b{img.width, img.height, -1, -1};
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (img.at(x, y) > thr) {
                b.min_x = std::min(b.min_x, x);
                b.min_y = std::min(b.min_y, y);
                b.max_x = std::max(b.max_x, x);
                b.max_y = std::max(b.max_y, y);
            }
    return b;
}

// Max-composite src onto dst at offset, restricted to the given tight box so
// that everything outside the reported ground-truth box stays pure background.
void composite_clipped(GrayImage& dst, const GrayImage& src, int off_x, int off_y,
                       const TightBox& clip) {
    for (int y = clip.min_y; y <= clip.max_y; ++y)
        for (int x = clip.min_x; x <= clip.max_x; ++x) {
            auto& d = dst.at(off_x + x, off_y + y);
            d = std::max(d, src.at(x, y));
        }
}

// Rotation + scale about the glyph center with bilinear sampling and zero
// padding, rendered directly on the canvas pixel grid. `center` is the glyph
// center in canvas coordinates.
GrayImage transform_glyph(const GrayImage& glyph, double angle_rad, double scale, double center_x,
                          double center_y, int region_x, int region_y, int region_w, int region_h) {
    GrayImage out(region_w, region_h);
    const double c = std::cos(angle_rad), s = std::sin(angle_rad);
    const double half = glyph.width / 2.0;
    for (int py = 0; py < region_h; ++py) {
        const double dy = region_y + py + 0.5 - center_y;
        for (int px = 0; px < region_w; ++px) {
            const double dx = region_x + px + 0.5 - center_x;
            // inverse rotate/scale into glyph coordinates
            const double ux = (c * dx + s * dy) / scale;
            const double uy = (-s * dx + c * dy) / scale;
            const double gx = ux + half - 0.5;
            const double gy = uy + half - 0.5;
            if (gx <= -1.0 || gy <= -1.0 || gx >= glyph.width || gy >= glyph.height) continue;
            const int x0 = static_cast<int>(std::floor(gx));
            const int y0 = static_cast<int>(std::floor(gy));
            const double fx = gx - x0, fy = gy - y0;
            auto sample = [&](int x, int y) -> double {
                if (x < 0 || y < 0 || x >= glyph.width || y >= glyph.height) return 0.0;
                return glyph.at(x, y);
            };
            const double top = (1.0 - fx) * sample(x0, y0) + fx * sample(x0 + 1, y0);
            const double bot = (1.0 - fx) * sample(x0, y0 + 1) + fx * sample(x0 + 1, y0 + 1);
            const double v = (1.0 - fy) * top + fy * bot;
            out.at(px, py) = static_cast<std::uint8_t>(std::lround(v));
        }
    }
    return out;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string composer_fingerprint(const ComposerConfig& cfg) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "canvas=%d len=%d..%d base=%d gap=%d..%d margin=%d mix=%.9f/%.9f/%.9f "
                  "aug=%d/%.9f/%.9f/%.9f words=%d seed=%llu thr=%d",
                  cfg.canvas_size, cfg.min_len, cfg.max_len, cfg.base_letter_size, cfg.gap_min,
                  cfg.gap_max, cfg.margin, cfg.mixture.p_normal, cfg.mixture.p_reversal,
                  cfg.mixture.p_corrected, cfg.augment.enabled ? 1 : 0, cfg.augment.rotation_deg,
                  cfg.augment.translate_ratio, cfg.augment.scale_delta, cfg.words_per_image,
                  static_cast<unsigned long long>(cfg.rng_seed), int(cfg.bin_threshold));
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf)));
    return hex;
}

}  // namespace

double ComposerConfig::augment_overshoot() const {
    if (!augment.enabled) return 0.0;
    const double r = augment.rotation_deg * kPi / 180.0;
    const double grow = (1.0 + augment.scale_delta) * (std::cos(r) + std::sin(r)) - 1.0;
    return augment.translate_ratio * base_letter_size + 0.5 * base_letter_size * grow;
}

void ComposerConfig::validate() const {
    if (canvas_size < 32) throw ConfigError("compose.canvas_size must be >= 32");
    if (base_letter_size < 8) throw ConfigError("compose.base_letter_size must be >= 8");
    if (min_len < 2 || min_len > max_len)
        throw ConfigError("compose.word length must satisfy 2 <= min_len <= max_len");
    if (margin < 0) throw ConfigError("compose.margin must be >= 0");
    if (gap_min < 1 || gap_min > gap_max)
        throw ConfigError("compose.gap_range must satisfy 1 <= min <= max");
    const double mix_sum = mixture.p_normal + mixture.p_reversal + mixture.p_corrected;
    if (mixture.p_normal < 0 || mixture.p_reversal < 0 || mixture.p_corrected < 0 ||
        std::abs(mix_sum - 1.0) > 1e-9)
        throw ConfigError("compose.mixture probabilities must be >= 0 and sum to 1");
    if (augment.rotation_deg < 0 || augment.rotation_deg >= 45.0)
        throw ConfigError("compose.augment.rotation_deg must be in [0, 45)");
    if (augment.translate_ratio < 0) throw ConfigError("compose.augment.translate_ratio must be >= 0");
    if (augment.scale_delta < 0 || augment.scale_delta >= 1.0)
        throw ConfigError("compose.augment.scale_delta must be in [0, 1)");
    if (max_len * (base_letter_size + gap_max) + 2 * margin > canvas_size)
        throw ConfigError("compose: max_len*(base_letter_size+gap_max)+2*margin exceeds canvas_size");
    if (augment.enabled && gap_min <= augment_overshoot())
        throw ConfigError("compose.gap_min must exceed the augmentation overshoot (" +
                          std::to_string(augment_overshoot()) + " px) to keep boxes disjoint");
    if (words_per_image < 1) throw ConfigError("compose.words_per_image must be >= 1");
    const int ov = static_cast<int>(std::ceil(augment_overshoot()));
    const int band = (canvas_size - 2 * margin) / words_per_image;
    if (band < base_letter_size + 2 * ov + 1)
        throw ConfigError("compose.words_per_image leaves vertical bands too small");
}

WordSpec sample_word_spec(Rng& rng, const ComposerConfig& cfg, const LetterPool& pool) {
    std::vector<std::string> ids[kNumClasses];
    for (int c = 0; c < kNumClasses; ++c) {
        const auto cls = static_cast<LetterClass>(c);
        if (cfg.mixture.prob(cls) > 0.0) {
            ids[c] = pool.letter_ids(cls);
            if (ids[c].empty())
                throw ConfigError(std::string("class ") + class_name(cls) +
                                  " has positive mixture probability but an empty pool");
        }
    }

    const int len = static_cast<int>(rng.uniform_int(cfg.min_len, cfg.max_len));
    WordSpec spec;
    spec.reserve(len);
    for (int i = 0; i < len; ++i) {
        const double u = rng.uniform();
        LetterClass cls;
        if (u < cfg.mixture.p_normal)
            cls = LetterClass::Normal;
        else if (u < cfg.mixture.p_normal + cfg.mixture.p_reversal)
            cls = LetterClass::Reversal;
        else
            cls = LetterClass::Corrected;
        const auto& letters = ids[static_cast<int>(cls)];
        spec.emplace_back(cls, letters[rng.below(letters.size())]);
    }
    return spec;
}

GroundTruthBox place_letter(GrayImage& canvas, const LetterSample& sample, int anchor_x,
                            int baseline_y, const ComposerConfig& cfg, Rng& rng) {
    const int base = cfg.base_letter_size;
    const GrayImage glyph = resize_bilinear(sample.image, base, base);
    const bool aug = cfg.augment.enabled;

    const int attempts = aug ? 10 : 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        double angle = 0.0, scale = 1.0, tx = 0.0, ty = 0.0;
        if (aug) {
            angle = rng.uniform(-cfg.augment.rotation_deg, cfg.augment.rotation_deg) * kPi / 180.0;
            scale = 1.0 + rng.uniform(-cfg.augment.scale_delta, cfg.augment.scale_delta);
            tx = rng.uniform(-cfg.augment.translate_ratio, cfg.augment.translate_ratio) * base;
            ty = rng.uniform(-cfg.augment.translate_ratio, cfg.augment.translate_ratio) * base;
        }
        const double center_x = anchor_x + base / 2.0 + tx;
        const double center_y = baseline_y - base / 2.0 + ty;

        GrayImage region;
        int region_x, region_y;
        if (aug) {
            const double half =
                0.5 * base * scale * (std::abs(std::cos(angle)) + std::abs(std::sin(angle))) + 1.0;
            region_x = static_cast<int>(std::floor(center_x - half));
            region_y = static_cast<int>(std::floor(center_y - half));
            const int region_w = static_cast<int>(std::ceil(center_x + half)) - region_x + 1;
            const int region_h = static_cast<int>(std::ceil(center_y + half)) - region_y + 1;
            region = transform_glyph(glyph, angle, scale, center_x, center_y, region_x, region_y,
                                     region_w, region_h);
        } else {
            region = glyph;
            region_x = anchor_x;
            region_y = baseline_y - base;
        }

        const TightBox tb = tight_box(region, cfg.bin_threshold);
        if (tb.empty()) continue;
        const PixelBox box{region_x + tb.min_x, region_y + tb.min_y, tb.max_x - tb.min_x + 1,
                           tb.max_y - tb.min_y + 1};
        if (box.x < 0 || box.y < 0 || box.right() > canvas.width || box.bottom() > canvas.height)
            continue;  // transformed glyph would exceed the canvas; redraw

        composite_clipped(canvas, region, region_x, region_y, tb);
        return {box, sample.cls, sample.letter_id};
    }
    throw PlacementError("letter '" + sample.letter_id + "' could not be placed at anchor " +
                         std::to_string(anchor_x) + " after 10 attempts");
}

namespace {

// Shared word layout: places one word inside the vertical band
// [band_lo, band_hi) and appends its boxes.
void layout_word(GrayImage& canvas, std::vector<GroundTruthBox>& out, const WordSpec& spec,
                 const LetterPool& pool, const ComposerConfig& cfg, Rng& rng, int band_lo,
                 int band_hi) {
    const int base = cfg.base_letter_size;
    const int ov = static_cast<int>(std::ceil(cfg.augment_overshoot()));
    const int n = static_cast<int>(spec.size());

    const int baseline_lo = band_lo + base + ov;
    const int baseline_hi = band_hi - 1 - ov;
    if (baseline_lo > baseline_hi)
        throw ConfigError("compose: vertical band too small for letters");
    const int baseline = static_cast<int>(rng.uniform_int(baseline_lo, baseline_hi));

    const int x_base = cfg.margin + ov;
    const int span_bound = n * (base + ov) + (n - 1) * cfg.gap_max;
    const int slack = (canvas.width - cfg.margin) - (x_base + span_bound);
    int anchor = x_base + (slack > 0 ? static_cast<int>(rng.uniform_int(0, slack)) : 0);

    for (int i = 0; i < n; ++i) {
        const auto& [cls, letter] = spec[i];
        const auto candidates = pool.samples_of(cls, letter);
        if (candidates.empty())
            throw ConfigError(std::string("pool has no sample for class ") + class_name(cls) +
                              " letter '" + letter + "'");
        const auto& sample = pool.by_class(cls)[candidates[rng.below(candidates.size())]];
        if (i > 0) anchor += static_cast<int>(rng.uniform_int(cfg.gap_min, cfg.gap_max));
        const GroundTruthBox box = place_letter(canvas, sample, anchor, baseline, cfg, rng);
        anchor = box.box.right();
        out.push_back(box);
    }
}

}  // namespace

WordScene compose_word(const WordSpec& spec, const LetterPool& pool, const ComposerConfig& cfg,
                       Rng& rng) {
    if (spec.empty()) throw ConfigError("compose: empty word spec");
    WordScene scene;
    scene.canvas = GrayImage(cfg.canvas_size, cfg.canvas_size);
    layout_word(scene.canvas, scene.boxes, spec, pool, cfg, rng, cfg.margin,
                cfg.canvas_size - cfg.margin);
    std::sort(scene.boxes.begin(), scene.boxes.end(), [](const auto& a, const auto& b) {
        return a.box.x != b.box.x ? a.box.x < b.box.x : a.box.y < b.box.y;
    });
    return scene;
}

WordScene compose_scene(const LetterPool& pool, const ComposerConfig& cfg, std::int64_t scene_id) {
    const std::uint64_t base_seed =
        derive_seed(cfg.rng_seed, kStreamScene, static_cast<std::uint64_t>(scene_id));

    // A long word can exhaust the per-letter retry budget near the right edge
    // (the augmented worst case exceeds the canvas for 7 letters at defaults,
    // roughly once per ~7000 scenes). Re-laying the whole scene from a derived
    // sub-stream keeps the result a pure function of (pool, cfg, scene_id).
    constexpr int kSceneAttempts = 16;
    for (int attempt = 0;; ++attempt) {
        const std::uint64_t seed =
            attempt == 0 ? base_seed
                         : derive_seed(base_seed, kStreamSceneRetry, static_cast<std::uint64_t>(attempt));
        Rng rng(seed);
        WordScene scene;
        scene.canvas = GrayImage(cfg.canvas_size, cfg.canvas_size);
        scene.scene_id = scene_id;
        scene.seed = seed;
        try {
            const int usable = cfg.canvas_size - 2 * cfg.margin;
            const int band = usable / cfg.words_per_image;
            for (int w = 0; w < cfg.words_per_image; ++w) {
                const WordSpec spec = sample_word_spec(rng, cfg, pool);
                const int lo = cfg.margin + w * band;
                layout_word(scene.canvas, scene.boxes, spec, pool, cfg, rng, lo, lo + band);
            }
        } catch (const PlacementError&) {
            if (attempt + 1 >= kSceneAttempts) throw;
            continue;
        }
        std::sort(scene.boxes.begin(), scene.boxes.end(), [](const auto& a, const auto& b) {
            return a.box.x != b.box.x ? a.box.x < b.box.x : a.box.y < b.box.y;
        });
        return scene;
    }
}

std::vector<int> assign_splits(std::uint64_t seed, std::int64_t n, const SplitFractions& split) {
    const double fr[3] = {split.train, split.val, split.test};
    double sum = 0.0;
    for (double f : fr) {
        if (f < 0.0) throw ConfigError("split fractions must be >= 0");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");

    // Largest-remainder quotas, then fill in hash-rank order.
    std::int64_t quota[3];
    double remainder[3];
    std::int64_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        const double exact = fr[i] * static_cast<double>(n);
        quota[i] = static_cast<std::int64_t>(std::floor(exact + 1e-12));
        remainder[i] = exact - static_cast<double>(quota[i]);
        assigned += quota[i];
    }
    while (assigned < n) {
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (remainder[i] > remainder[best]) best = i;
        ++quota[best];
        remainder[best] = -1.0;
        ++assigned;
    }

    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::uint64_t> rank(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        rank[i] = derive_seed(seed, kStreamSplit, static_cast<std::uint64_t>(i));
    std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
        return rank[a] != rank[b] ? rank[a] < rank[b] : a < b;
    });

    std::vector<int> out(static_cast<std::size_t>(n));
    std::int64_t pos = 0;
    for (int s = 0; s < 3; ++s)
        for (std::int64_t k = 0; k < quota[s]; ++k) out[order[pos++]] = s;
    return out;
}

DatasetPaths generate_dataset(const LetterPool& pool, const ComposerConfig& cfg,
                              std::int64_t n_images, const SplitFractions& split,
                              const fs::path& out_root, int workers) {
    cfg.validate();
    if (n_images < 0) throw ConfigError("n_images must be >= 0");

    std::error_code ec;
    fs::create_directories(out_root, ec);
    if (ec) throw IoError("cannot create output directory " + out_root.string());

    const std::vector<int> assignment = assign_splits(cfg.rng_seed, n_images, split);
    bool split_used[3] = {false, false, false};
    for (int s : assignment) split_used[s] = true;
    for (int s = 0; s < 3; ++s) {
        if (!split_used[s]) continue;
        fs::create_directories(out_root / "images" / kSplitNames[s]);
        fs::create_directories(out_root / "labels" / kSplitNames[s]);
    }

    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;

    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&]() {
        for (;;) {
            const std::int64_t i = next.fetch_add(1);
            if (i >= n_images) return;
            try {
                const WordScene scene = compose_scene(pool, cfg, i);
                char name[32];
                std::snprintf(name, sizeof(name), "%06lld", static_cast<long long>(i));
                const char* sp = kSplitNames[assignment[static_cast<std::size_t>(i)]];
                write_png_gray(out_root / "images" / sp / (std::string(name) + ".png"), scene.canvas);
                write_labels(scene, out_root / "labels" / sp / (std::string(name) + ".txt"));
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(n_images);
                return;
            }
        }
    };

    if (workers == 1 || n_images <= 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < workers; ++t) threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    DatasetManifest manifest;
    manifest.class_names = {"Normal", "Reversal", "Corrected"};
    manifest.image_size = cfg.canvas_size;
    manifest.master_seed = cfg.rng_seed;
    manifest.config_hash = composer_fingerprint(cfg);
    manifest.tool_version = kVersion;
    manifest.base_dir = out_root;
    for (std::int64_t i = 0; i < n_images; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "%06lld", static_cast<long long>(i));
        const int s = assignment[static_cast<std::size_t>(i)];
        manifest.splits[s].push_back(
            {std::string("images/") + kSplitNames[s] + "/" + name + ".png",
             std::string("labels/") + kSplitNames[s] + "/" + name + ".txt"});
    }
    const fs::path manifest_path = out_root / "manifest.json";
    write_manifest(manifest, manifest_path);
    return {out_root, manifest_path};
}

}  // namespace lexikit
