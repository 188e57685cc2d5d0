#pragma once

#include <string>

#include "lexikit/letter_prep.hpp"

namespace lexikit {

// Axis-aligned box in canvas pixels, origin top-left. Geometry treats a box
// as the half-open rectangle [x, x+w) x [y, y+h).
struct PixelBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int right() const { return x + w; }
    int bottom() const { return y + h; }
    bool operator==(const PixelBox&) const = default;
};

struct GroundTruthBox {
    PixelBox box;
    LetterClass cls = LetterClass::Normal;
    std::string letter_id;
};

// Box in the normalized label convention: center and extent as fractions of
// the image side.
struct NormalizedBox {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;
};

struct Detection {
    PixelBox box;
    LetterClass cls = LetterClass::Normal;
    double confidence = 0.0;
    std::string image_id;
};

NormalizedBox to_normalized(const PixelBox& box, int img_size);
PixelBox to_pixel(const NormalizedBox& box, int img_size);

}  // namespace lexikit
