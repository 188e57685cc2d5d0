#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lexikit/image.hpp"
#include "lexikit/letter_prep.hpp"
#include "lexikit/rng.hpp"

namespace lexikit {

// Polyline letterform in a unit square (x right, y down).
struct StrokeSegment {
    double x0, y0, x1, y1;
};

struct StrokeSkeleton {
    char letter_id = '?';
    std::vector<StrokeSegment> segments;
    double stroke_width = 0.11;  // fraction of glyph size
};

// Built-in skeletons. Every letter here is horizontally asymmetric and no two
// letters are mirror images of each other, so the Reversal class stays
// distinguishable from every Normal letterform.
const std::vector<StrokeSkeleton>& builtin_skeletons();
const StrokeSkeleton& skeleton_for(char letter);  // throws ConfigError for unknown letters

struct SynthConfig {
    std::string alphabet = "befkrs";
    double jitter_px = 0.9;              // max endpoint perturbation at render size
    double width_min = 0.05;             // stroke width bounds, fraction of size
    double width_max = 0.09;
    double correction_ghost_alpha = 0.35;
    double artifact_probability = 1.0;   // chance a Corrected sample carries artifacts
    int overdraw_min = 1;                // overdraw strokes per Corrected sample
    int overdraw_max = 3;
    int render_size = 64;                // raster size before crop/resize to 32x32
    std::uint64_t rng_seed = 0;

    void validate() const;  // throws ConfigError
};

// Rasterizes the skeleton as anti-aliased capsule strokes, ink on black.
// rng is consumed only for endpoint jitter; zero jitter renders identically
// for any stream.
GrayImage render_skeleton(const StrokeSkeleton& sk, int size, double jitter_px, Rng& rng);

// Corrected-letter stand-in: saturating max of the glyph and an alpha-scaled
// mirror of it, plus short bright overdraw strokes through the ink area.
GrayImage apply_correction_artifact(const GrayImage& img, double alpha, Rng& rng,
                                    int strokes_min = 1, int strokes_max = 3);

// Builds a pool of per_class_count samples per class. Sample i of every class
// starts from the same base render (stream derive_seed(seed, kStreamRender, i)),
// so Reversal i is exactly the mirror of Normal i before crop/resize.
LetterPool synth_pool(const SynthConfig& cfg, int per_class_count);

}  // namespace lexikit
