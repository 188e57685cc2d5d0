#include "lexikit/glyph_synth.hpp"

#include <algorithm>
#include <cmath>

#include "lexikit/errors.hpp"

namespace lexikit {

namespace {

// Coverage-style intensity from the distance to a capsule of half-width hw:
// fully inked inside, one-pixel anti-aliasing ramp at the boundary.
std::uint8_t capsule_intensity(double dist, double hw) {
    const double cov = std::clamp(hw + 0.5 - dist, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(255.0 * cov));
}

double dist_to_segment(double px, double py, double x0, double y0, double x1, double y1) {
    const double dx = x1 - x0, dy = y1 - y0;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((px - x0) * dx + (py - y0) * dy) / len2, 0.0, 1.0);
    const double cx = x0 + t * dx, cy = y0 + t * dy;
    return std::hypot(px - cx, py - cy);
}

void draw_capsule(GrayImage& img, double x0, double y0, double x1, double y1, double hw) {
    const int lo_x = std::max(0, static_cast<int>(std::floor(std::min(x0, x1) - hw - 1.0)));
    const int hi_x = std::min(img.width - 1, static_cast<int>(std::ceil(std::max(x0, x1) + hw + 1.0)));
    const int lo_y = std::max(0, static_cast<int>(std::floor(std::min(y0, y1) - hw - 1.0)));
    const int hi_y = std::min(img.height - 1, static_cast<int>(std::ceil(std::max(y0, y1) + hw + 1.0)));
    for (int y = lo_y; y <= hi_y; ++y) {
        for (int x = lo_x; x <= hi_x; ++x) {
            const double d = dist_to_segment(x + 0.5, y + 0.5, x0, y0, x1, y1);
            img.at(x, y) = std::max(img.at(x, y), capsule_intensity(d, hw));
        }
    }
}

std::vector<StrokeSkeleton> make_builtin_skeletons() {
    // Unit square, y down. Only horizontally asymmetric letterforms, and no
    // pair of letters mirrors onto each other ('d' is deliberately absent:
    // as a polyline it would be the mirror of 'b', making a Normal 'd'
    // indistinguishable from a Reversal 'b').
    std::vector<StrokeSkeleton> v;
    v.push_back({'b',
                 {{0.22, 0.06, 0.22, 0.94},
                  {0.22, 0.52, 0.62, 0.50},
                  {0.62, 0.50, 0.76, 0.62},
                  {0.76, 0.62, 0.76, 0.80},
                  {0.76, 0.80, 0.62, 0.92},
                  {0.62, 0.92, 0.22, 0.94}}});
    v.push_back({'e',
                 {{0.20, 0.56, 0.78, 0.54},
                  {0.78, 0.54, 0.74, 0.34},
                  {0.74, 0.34, 0.50, 0.24},
                  {0.50, 0.24, 0.28, 0.36},
                  {0.28, 0.36, 0.20, 0.56},
                  {0.20, 0.56, 0.28, 0.78},
                  {0.28, 0.78, 0.52, 0.88},
                  {0.52, 0.88, 0.76, 0.80}}});
    v.push_back({'f',
                 {{0.64, 0.14, 0.48, 0.06},
                  {0.48, 0.06, 0.36, 0.18},
                  {0.36, 0.18, 0.36, 0.94},
                  {0.18, 0.42, 0.62, 0.42}}});
    v.push_back({'k',
                 {{0.24, 0.06, 0.24, 0.94},
                  {0.24, 0.60, 0.70, 0.26},
                  {0.40, 0.48, 0.74, 0.94}}});
    v.push_back({'r',
                 {{0.30, 0.30, 0.30, 0.92},
                  {0.30, 0.54, 0.46, 0.34},
                  {0.46, 0.34, 0.70, 0.30}}});
    v.push_back({'s',
                 {{0.74, 0.30, 0.54, 0.22},
                  {0.54, 0.22, 0.32, 0.30},
                  {0.32, 0.30, 0.30, 0.44},
                  {0.30, 0.44, 0.52, 0.54},
                  {0.52, 0.54, 0.70, 0.62},
                  {0.70, 0.62, 0.68, 0.78},
                  {0.68, 0.78, 0.46, 0.88},
                  {0.46, 0.88, 0.26, 0.80}}});
    return v;
}

}  // namespace

const std::vector<StrokeSkeleton>& builtin_skeletons() {
    static const std::vector<StrokeSkeleton> table = make_builtin_skeletons();
    return table;
}

const StrokeSkeleton& skeleton_for(char letter) {
    for (const auto& sk : builtin_skeletons())
        if (sk.letter_id == letter) return sk;
    throw ConfigError(std::string("no skeleton for letter '") + letter + "'");
}

void SynthConfig::validate() const {
    if (alphabet.empty()) throw ConfigError("synth.alphabet must be non-empty");
    for (char c : alphabet) skeleton_for(c);
    if (!(correction_ghost_alpha >= 0.0 && correction_ghost_alpha <= 1.0))
        throw ConfigError("synth.correction_ghost_alpha must be in [0,1]");
    if (!(artifact_probability >= 0.0 && artifact_probability <= 1.0))
        throw ConfigError("synth.artifact_probability must be in [0,1]");
    if (!(width_min > 0.0 && width_min <= width_max))
        throw ConfigError("synth.width_range must satisfy 0 < min <= max");
    if (overdraw_min < 0 || overdraw_min > overdraw_max)
        throw ConfigError("synth.overdraw range must satisfy 0 <= min <= max");
    if (render_size < 8) throw ConfigError("synth.render_size must be >= 8");
    if (jitter_px < 0.0) throw ConfigError("synth.jitter_px must be >= 0");
}

GrayImage render_skeleton(const StrokeSkeleton& sk, int size, double jitter_px, Rng& rng) {
    if (size < 8) throw ConfigError("render size must be >= 8");
    if (sk.segments.empty()) throw ConfigError("skeleton has no segments");
    GrayImage img(size, size);
    const double hw = 0.5 * sk.stroke_width * size;
    for (const auto& seg : sk.segments) {
        double x0 = seg.x0 * size, y0 = seg.y0 * size;
        double x1 = seg.x1 * size, y1 = seg.y1 * size;
        if (jitter_px > 0.0) {
            x0 += rng.uniform(-jitter_px, jitter_px);
            y0 += rng.uniform(-jitter_px, jitter_px);
            x1 += rng.uniform(-jitter_px, jitter_px);
            y1 += rng.uniform(-jitter_px, jitter_px);
        }
        draw_capsule(img, x0, y0, x1, y1, hw);
    }
    return img;
}

GrayImage apply_correction_artifact(const GrayImage& img, double alpha, Rng& rng,
                                    int strokes_min, int strokes_max) {
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("ghost alpha must be in [0,1]");
    const GrayImage ghost = mirror(img);
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const auto faint = static_cast<std::uint8_t>(std::lround(alpha * ghost.pixels[i]));
        out.pixels[i] = std::max(img.pixels[i], faint);
    }

    const int n_strokes =
        strokes_max > 0 ? static_cast<int>(rng.uniform_int(strokes_min, strokes_max)) : 0;
    if (n_strokes > 0) {
        // Overdraw marks re-trace the glyph: each is a short chord between two
        // nearby ink pixels, nudged sideways so it reads as a second pass of
        // the pen rather than an exact cover.
        std::vector<std::pair<int, int>> ink;
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                if (img.at(x, y) > 128) ink.emplace_back(x, y);
        if (!ink.empty()) {
            const double min_len = 0.08 * img.width;
            const double max_len = 0.22 * img.width;
            const double hw = 0.022 * img.width;
            for (int s = 0; s < n_strokes; ++s) {
                const auto& [px, py] = ink[rng.below(ink.size())];
                std::vector<std::pair<int, int>> ends;
                for (const auto& [qx, qy] : ink) {
                    const double d = std::hypot(qx - px, qy - py);
                    if (d >= min_len && d <= max_len) ends.emplace_back(qx, qy);
                }
                if (ends.empty()) continue;
                const auto& [qx, qy] = ends[rng.below(ends.size())];
                const double dx = qx - px, dy = qy - py;
                const double norm = std::hypot(dx, dy);
                const double off = rng.uniform(-1.0, 1.0);  // perpendicular nudge
                const double ox = -dy / norm * off, oy = dx / norm * off;
                draw_capsule(out, px + 0.5 + ox, py + 0.5 + oy, qx + 0.5 + ox, qy + 0.5 + oy, hw);
            }
        }
    }
    return out;
}

LetterPool synth_pool(const SynthConfig& cfg, int per_class_count) {
    cfg.validate();
    if (per_class_count < 1) throw ConfigError("per_class_count must be >= 1");

    LetterPool pool;
    for (int i = 0; i < per_class_count; ++i) {
        const char letter = cfg.alphabet[i % cfg.alphabet.size()];
        StrokeSkeleton sk = skeleton_for(letter);

        // Same base render for all three classes of index i.
        Rng render_rng(derive_seed(cfg.rng_seed, kStreamRender, static_cast<std::uint64_t>(i)));
        sk.stroke_width = render_rng.uniform(cfg.width_min, cfg.width_max);
        const GrayImage base = render_skeleton(sk, cfg.render_size, cfg.jitter_px, render_rng);

        const std::string tag = "synth:" + std::to_string(cfg.rng_seed) + ":" + std::to_string(i);
        auto push = [&](LetterClass c, GrayImage raw) {
            LetterSample s;
            s.image = prep_letter_gray(raw);
            s.cls = c;
            s.letter_id = std::string(1, letter);
            s.source = tag;
            pool.by_class(c).push_back(std::move(s));
        };

        push(LetterClass::Normal, base);
        push(LetterClass::Reversal, mirror(base));

        Rng art_rng(derive_seed(cfg.rng_seed, kStreamArtifact, static_cast<std::uint64_t>(i)));
        GrayImage corrected = base;
        if (cfg.artifact_probability >= 1.0 || art_rng.uniform() < cfg.artifact_probability) {
            corrected = apply_correction_artifact(base, cfg.correction_ghost_alpha, art_rng,
                                                  cfg.overdraw_min, cfg.overdraw_max);
        }
        push(LetterClass::Corrected, std::move(corrected));
    }
    return pool;
}

}  // namespace lexikit
