#include "lexikit/image.hpp"

#include <algorithm>
#include <cmath>

#include "lexikit/errors.hpp"

namespace lexikit {

GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h) {
    if (img.width < 1 || img.height < 1) throw Error("resize_bilinear: empty input");
    GrayImage out(out_w, out_h);
    const double sx_scale = static_cast<double>(img.width) / out_w;
    const double sy_scale = static_cast<double>(img.height) / out_h;
    for (int oy = 0; oy < out_h; ++oy) {
        double sy = (oy + 0.5) * sy_scale - 0.5;
        sy = std::clamp(sy, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(sy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double fy = sy - y0;
        for (int ox = 0; ox < out_w; ++ox) {
            double sx = (ox + 0.5) * sx_scale - 0.5;
            sx = std::clamp(sx, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(sx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double fx = sx - x0;
            const double top = (1.0 - fx) * img.at(x0, y0) + fx * img.at(x1, y0);
            const double bot = (1.0 - fx) * img.at(x0, y1) + fx * img.at(x1, y1);
            const double v = (1.0 - fy) * top + fy * bot;
            out.at(ox, oy) = static_cast<std::uint8_t>(std::lround(v));
        }
    }
    return out;
}

GrayImage mirror(const GrayImage& img) {
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) out.at(x, y) = img.at(img.width - 1 - x, y);
    return out;
}

}  // namespace lexikit
