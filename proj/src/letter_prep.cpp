#include "lexikit/letter_prep.hpp"

#include <algorithm>
#include <cmath>

#include "lexikit/errors.hpp"
#include "lexikit/png_io.hpp"

namespace lexikit {

namespace fs = std::filesystem;

const char* class_name(LetterClass c) {
    switch (c) {
        case LetterClass::Normal: return "Normal";
        case LetterClass::Reversal: return "Reversal";
        default: return "Corrected";
    }
}

LetterClass class_from_code(int code) {
    if (code < 0 || code >= kNumClasses)
        throw ParseError("class code " + std::to_string(code) + " outside {0,1,2}");
    return static_cast<LetterClass>(code);
}

std::vector<std::string> LetterPool::letter_ids(LetterClass c) const {
    std::vector<std::string> ids;
    for (const auto& s : by_class(c))
        if (std::find(ids.begin(), ids.end(), s.letter_id) == ids.end()) ids.push_back(s.letter_id);
    return ids;
}

std::vector<std::size_t> LetterPool::samples_of(LetterClass c, const std::string& letter_id) const {
    std::vector<std::size_t> idx;
    const auto& list = by_class(c);
    for (std::size_t i = 0; i < list.size(); ++i)
        if (list[i].letter_id == letter_id) idx.push_back(i);
    return idx;
}

GrayImage to_grayscale(const Raster& img) {
    if (img.channels != 1 && img.channels != 3 && img.channels != 4)
        throw ConfigError("unsupported channel count " + std::to_string(img.channels) +
                          " (expected 1, 3, or 4)");
    GrayImage out(img.width, img.height);
    if (img.channels == 1) {
        out.pixels = img.pixels;
        return out;
    }
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double v = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                             0.114 * img.at(x, y, 2);
            out.at(x, y) = static_cast<std::uint8_t>(std::lround(v));
        }
    }
    return out;
}

GrayImage normalize_polarity(const GrayImage& img) {
    if (img.mean() <= 127.5) return img;
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        out.pixels[i] = static_cast<std::uint8_t>(255 - img.pixels[i]);
    return out;
}

GrayImage crop_to_content(const GrayImage& img, std::uint8_t bin_threshold) {
    int min_x = img.width, min_y = img.height, max_x = -1, max_y = -1;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (img.at(x, y) > bin_threshold) {
                min_x = std::min(min_x, x);
                min_y = std::min(min_y, y);
                max_x = std::max(max_x, x);
                max_y = std::max(max_y, y);
            }
        }
    }
    if (max_x < 0)
        throw EmptyGlyphError("no pixel above threshold " + std::to_string(int(bin_threshold)));
    GrayImage out(max_x - min_x + 1, max_y - min_y + 1);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) out.at(x, y) = img.at(min_x + x, min_y + y);
    return out;
}

GrayImage resize_letter(const GrayImage& img) { return resize_bilinear(img, kLetterSize, kLetterSize); }

GrayImage prep_letter_gray(const GrayImage& img, std::uint8_t bin_threshold) {
    return resize_letter(crop_to_content(normalize_polarity(img), bin_threshold));
}

GrayImage prep_letter(const Raster& img, std::uint8_t bin_threshold) {
    return prep_letter_gray(to_grayscale(img), bin_threshold);
}

LetterPool load_letter_pool(const fs::path& root, std::uint8_t bin_threshold) {
    LetterPool pool;
    for (int c = 0; c < kNumClasses; ++c) {
        const fs::path dir = root / class_name(static_cast<LetterClass>(c));
        if (!fs::is_directory(dir))
            throw ConfigError("missing class directory: " + dir.string());

        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".png")
                files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end(),
                  [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

        for (const auto& file : files) {
            try {
                LetterSample sample;
                sample.image = prep_letter(read_png(file), bin_threshold);
                sample.cls = static_cast<LetterClass>(c);
                const std::string stem = file.stem().string();
                const auto sep = stem.find('_');
                sample.letter_id = (sep == std::string::npos) ? stem : stem.substr(0, sep);
                sample.source = file.string();
                pool.samples[c].push_back(std::move(sample));
            } catch (const IoError&) {
                ++pool.skipped;
            } catch (const EmptyGlyphError&) {
                ++pool.skipped;
            }
        }
    }
    return pool;
}

void export_pool(const LetterPool& pool, const fs::path& root) {
    for (int c = 0; c < kNumClasses; ++c) {
        const fs::path dir = root / class_name(static_cast<LetterClass>(c));
        fs::create_directories(dir);
        const auto& list = pool.samples[c];
        for (std::size_t i = 0; i < list.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof(name), "%s_%04zu.png", list[i].letter_id.c_str(), i);
            write_png_gray(dir / name, list[i].image);
        }
    }
}

}  // namespace lexikit
