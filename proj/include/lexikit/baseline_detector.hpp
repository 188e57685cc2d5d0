#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lexikit/annotation_io.hpp"
#include "lexikit/boxes.hpp"
#include "lexikit/image.hpp"
#include "lexikit/letter_prep.hpp"

namespace lexikit {

struct BitMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  //  0/1 per pixel, row-major

    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
};

struct Component {
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;  // inclusive pixel extremes
    std::int64_t area = 0;
    std::vector<std::pair<int, int>> pixels;  // (x, y), sorted by (y, x)

    PixelBox bbox() const { return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1}; }
};

// mask(x,y) = canvas(x,y) > thr
BitMask binarize(const GrayImage& canvas, std::uint8_t thr);

// 8-connected components, ordered by (min y, min x).
std::vector<Component> connected_components(const BitMask& mask);

// Reference glyphs for nearest-template classification, one list per class.
struct TemplateBank {
    std::vector<GrayImage> templates[kNumClasses];  // each 32x32

    static TemplateBank from_pool(const LetterPool& pool);
    bool valid() const;
};

struct ClassifyResult {
    LetterClass cls = LetterClass::Normal;
    double confidence = 0.0;
    bool ok = false;  // false when the crop had no content (skipped proposal)
};

// Normalizes the crop (crop_to_content + resize) and classifies it by the
// globally nearest template under mean absolute pixel difference d1, with
// confidence d2/(d1+d2) where d2 is the nearest distance among templates of
// any other class. d1=0 gives confidence 1; d1=d2 gives 0.5.
ClassifyResult classify_crop(const GrayImage& crop, const TemplateBank& bank,
                             std::uint8_t bin_threshold = kDefaultBinThreshold);

struct DetectorParams {
    std::uint8_t bin_threshold = kDefaultBinThreshold;
    std::int64_t min_component_area = 16;
};

// Connected-component proposals classified against the bank, sorted by
// descending confidence (stable in component order).
std::vector<Detection> detect(const GrayImage& canvas, const TemplateBank& bank,
                              const DetectorParams& params = {});

// Runs detect over every image of a manifest split, writing prediction files
// that mirror the label naming under out_root/<split>/. Parallel over
// `workers` threads; output bytes do not depend on the worker count.
void detect_dataset(const DatasetManifest& manifest, const std::string& split,
                    const TemplateBank& bank, const DetectorParams& params,
                    const std::filesystem::path& out_root, int workers = 0);

}  // namespace lexikit
