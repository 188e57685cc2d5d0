#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace lexikit {

// Single-channel 8-bit image, row-major, origin top-left.
// Convention throughout the library: 0 is background, bright pixels are ink.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    double mean() const {
        if (pixels.empty()) return 0.0;
        std::uint64_t sum = 0;
        for (std::uint8_t p : pixels) sum += p;
        return static_cast<double>(sum) / static_cast<double>(pixels.size());
    }

    std::int64_t count_above(std::uint8_t thr) const {
        std::int64_t n = 0;
        for (std::uint8_t p : pixels) n += (p > thr) ? 1 : 0;
        return n;
    }

    bool operator==(const GrayImage&) const = default;
};

// Interleaved 8-bit raster with 1..4 channels, as decoded from a PNG.
struct Raster {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;  // row-major, channel-interleaved

    std::uint8_t at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

// Bilinear resize with half-pixel centers and edge clamping.
// Sample position for destination x is (x + 0.5) * src_w / dst_w - 0.5; results
// are rounded to the nearest integer. A same-size resize reproduces the input
// byte for byte.
GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h);

// Horizontal flip: out(x, y) = in(width-1-x, y).
GrayImage mirror(const GrayImage& img);

}  // namespace lexikit
