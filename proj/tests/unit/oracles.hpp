#pragma once

// Independent reference implementations used only by tests. Each one takes a
// deliberately different route from the library code it checks.

#include <cstdint>
#include <vector>

#include "lexikit/boxes.hpp"
#include "lexikit/eval.hpp"
#include "lexikit/image.hpp"
#include "lexikit/word_composer.hpp"

namespace oracle {

// Direct bilinear evaluation in floating point at half-pixel sample positions.
lexikit::GrayImage bilinear(const lexikit::GrayImage& img, int out_w, int out_h);

struct Bounds {
    int min_x, min_y, max_x, max_y;
    bool found;
};

// Plain min/max scan for content bounds.
Bounds content_bounds(const lexikit::GrayImage& img, std::uint8_t thr);

// Queue-based flood fill, 8-connectivity. Components come back as sorted
// (y, x) pixel lists, ordered by (min y, min x).
std::vector<std::vector<std::pair<int, int>>> flood_components(
    const std::vector<std::uint8_t>& mask, int w, int h);

// IoU by counting lattice pixels inside each half-open rectangle.
double iou_by_pixel_count(const lexikit::PixelBox& a, const lexikit::PixelBox& b);

// Greedy matching re-derived with repeated full scans and the pixel-count IoU.
// Returns per-detection matched gt index (-1 for none), detections taken in
// descending confidence with input-order ties.
std::vector<int> greedy_match(const std::vector<lexikit::Detection>& dets,
                              const std::vector<lexikit::EvalGt>& gts, lexikit::LetterClass cls,
                              double iou_thr);

// AP recomputed from scratch: fresh matching per prefix size, envelope by an
// explicit max-over-suffix scan, integration over recall deltas.
double average_precision(const std::vector<lexikit::Detection>& dets,
                         const std::vector<lexikit::EvalGt>& gts, lexikit::LetterClass cls,
                         double iou_thr);

// The documented split-assignment rule, reimplemented.
std::vector<int> split_assignment(std::uint64_t seed, std::int64_t n,
                                  const lexikit::SplitFractions& split);

}  // namespace oracle
