#include "lexikit/boxes.hpp"

#include <cmath>

namespace lexikit {

NormalizedBox to_normalized(const PixelBox& box, int img_size) {
    const double s = img_size;
    return {(box.x + box.w / 2.0) / s, (box.y + box.h / 2.0) / s, box.w / s, box.h / s};
}

PixelBox to_pixel(const NormalizedBox& box, int img_size) {
    const double s = img_size;
    PixelBox p;
    p.w = static_cast<int>(std::lround(box.w * s));
    p.h = static_cast<int>(std::lround(box.h * s));
    p.x = static_cast<int>(std::lround(box.cx * s - box.w * s / 2.0));
    p.y = static_cast<int>(std::lround(box.cy * s - box.h * s / 2.0));
    return p;
}

}  // namespace lexikit
