#include "lexikit/baseline_detector.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <limits>
#include <mutex>
#include <thread>

#include "lexikit/errors.hpp"
#include "lexikit/png_io.hpp"

namespace lexikit {

namespace fs = std::filesystem;

BitMask binarize(const GrayImage& canvas, std::uint8_t thr) {
    BitMask mask;
    mask.width = canvas.width;
    mask.height = canvas.height;
    mask.bits.resize(canvas.pixels.size());
    for (std::size_t i = 0; i < canvas.pixels.size(); ++i)
        mask.bits[i] = canvas.pixels[i] > thr ? 1 : 0;
    return mask;
}

std::vector<Component> connected_components(const BitMask& mask) {
    const int w = mask.width, h = mask.height;
    std::vector<std::int32_t> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<Component> comps;
    std::vector<std::pair<int, int>> stack;

    // Scan order (y, then x) makes component order (min y, min x): the first
    // pixel reached in a component is its top-most, left-most-in-top-row
    // pixel, and components are emitted in the order of those pixels. min_x
    // over the whole component can be smaller, so a final sort fixes the rare
    // case of two components sharing min_y.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y) || label[static_cast<std::size_t>(y) * w + x] >= 0) continue;
            const auto id = static_cast<std::int32_t>(comps.size());
            Component comp;
            comp.min_x = comp.max_x = x;
            comp.min_y = comp.max_y = y;
            stack.clear();
            stack.emplace_back(x, y);
            label[static_cast<std::size_t>(y) * w + x] = id;
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                comp.pixels.emplace_back(cx, cy);
                comp.min_x = std::min(comp.min_x, cx);
                comp.max_x = std::max(comp.max_x, cx);
                comp.min_y = std::min(comp.min_y, cy);
                comp.max_y = std::max(comp.max_y, cy);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        auto& l = label[static_cast<std::size_t>(ny) * w + nx];
                        if (l >= 0 || !mask.at(nx, ny)) continue;
                        l = id;
                        stack.emplace_back(nx, ny);
                    }
                }
            }
            comp.area = static_cast<std::int64_t>(comp.pixels.size());
            std::sort(comp.pixels.begin(), comp.pixels.end(), [](const auto& a, const auto& b) {
                return a.second != b.second ? a.second < b.second : a.first < b.first;
            });
            comps.push_back(std::move(comp));
        }
    }
    std::sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
        return a.min_y != b.min_y ? a.min_y < b.min_y : a.min_x < b.min_x;
    });
    return comps;
}

TemplateBank TemplateBank::from_pool(const LetterPool& pool) {
    TemplateBank bank;
    for (int c = 0; c < kNumClasses; ++c)
        for (const auto& s : pool.samples[c]) bank.templates[c].push_back(s.image);
    return bank;
}

bool TemplateBank::valid() const {
    for (int c = 0; c < kNumClasses; ++c)
        if (templates[c].empty()) return false;
    return true;
}

namespace {

double mean_abs_diff(const GrayImage& a, const GrayImage& b) {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i)
        sum += std::abs(int(a.pixels[i]) - int(b.pixels[i]));
    return static_cast<double>(sum) / static_cast<double>(a.pixels.size());
}

}  // namespace

ClassifyResult classify_crop(const GrayImage& crop, const TemplateBank& bank,
                             std::uint8_t bin_threshold) {
    if (!bank.valid()) throw ConfigError("template bank has an empty class");

    GrayImage norm;
    try {
        norm = resize_letter(crop_to_content(crop, bin_threshold));
    } catch (const EmptyGlyphError&) {
        return {};  // no content: proposal is skipped
    }

    double best_by_class[kNumClasses];
    for (int c = 0; c < kNumClasses; ++c) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& tmpl : bank.templates[c]) best = std::min(best, mean_abs_diff(norm, tmpl));
        best_by_class[c] = best;
    }

    int winner = 0;
    for (int c = 1; c < kNumClasses; ++c)
        if (best_by_class[c] < best_by_class[winner]) winner = c;
    const double d1 = best_by_class[winner];
    double d2 = std::numeric_limits<double>::infinity();
    for (int c = 0; c < kNumClasses; ++c)
        if (c != winner) d2 = std::min(d2, best_by_class[c]);

    ClassifyResult result;
    result.cls = static_cast<LetterClass>(winner);
    result.confidence = (d1 + d2 > 0.0) ? d2 / (d1 + d2) : 0.5;
    result.ok = true;
    return result;
}

std::vector<Detection> detect(const GrayImage& canvas, const TemplateBank& bank,
                              const DetectorParams& params) {
    const BitMask mask = binarize(canvas, params.bin_threshold);
    std::vector<Detection> dets;
    for (const auto& comp : connected_components(mask)) {
        if (comp.area < params.min_component_area) continue;
        const PixelBox box = comp.bbox();
        GrayImage crop(box.w, box.h);
        for (int y = 0; y < box.h; ++y)
            for (int x = 0; x < box.w; ++x) crop.at(x, y) = canvas.at(box.x + x, box.y + y);
        const ClassifyResult r = classify_crop(crop, bank, params.bin_threshold);
        if (!r.ok) continue;
        Detection d;
        d.box = box;
        d.cls = r.cls;
        d.confidence = r.confidence;
        dets.push_back(std::move(d));
    }
    std::stable_sort(dets.begin(), dets.end(),
                     [](const Detection& a, const Detection& b) { return a.confidence > b.confidence; });
    return dets;
}

void detect_dataset(const DatasetManifest& manifest, const std::string& split,
                    const TemplateBank& bank, const DetectorParams& params,
                    const fs::path& out_root, int workers) {
    const auto& entries = manifest.split(split);
    fs::create_directories(out_root / split);

    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= entries.size()) return;
            try {
                const GrayImage canvas = to_grayscale(read_png(manifest.base_dir / entries[i].image));
                const auto dets = detect(canvas, bank, params);
                const fs::path label(entries[i].label);
                write_predictions(dets, canvas.width, out_root / split / label.filename());
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(entries.size());
                return;
            }
        }
    };

    if (workers == 1 || entries.size() <= 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < workers; ++t) threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace lexikit
