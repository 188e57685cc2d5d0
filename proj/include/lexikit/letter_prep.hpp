#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lexikit/image.hpp"

namespace lexikit {

constexpr int kLetterSize = 32;
constexpr std::uint8_t kDefaultBinThreshold = 128;

enum class LetterClass : int { Normal = 0, Reversal = 1, Corrected = 2 };

constexpr int kNumClasses = 3;

const char* class_name(LetterClass c);
LetterClass class_from_code(int code);  // throws ParseError for codes outside {0,1,2}

// One normalized 32x32 ink-on-black glyph.
struct LetterSample {
    GrayImage image;        // exactly 32x32, mean intensity < 128
    LetterClass cls = LetterClass::Normal;
    std::string letter_id;  // underlying character, e.g. "b"
    std::string source;     // file path or synth seed tag
};

struct LetterPool {
    std::vector<LetterSample> samples[kNumClasses];
    int skipped = 0;  // undecodable files encountered by load_letter_pool

    const std::vector<LetterSample>& by_class(LetterClass c) const {
        return samples[static_cast<int>(c)];
    }
    std::vector<LetterSample>& by_class(LetterClass c) { return samples[static_cast<int>(c)]; }
    std::size_t count(LetterClass c) const { return by_class(c).size(); }

    // Distinct letter ids present in a class, in first-seen order.
    std::vector<std::string> letter_ids(LetterClass c) const;
    // Indices into by_class(c) whose letter_id matches.
    std::vector<std::size_t> samples_of(LetterClass c, const std::string& letter_id) const;
};

// Luminance conversion with ITU-R 601 weights (0.299/0.587/0.114), rounded to
// nearest. 1-channel input passes through; 4-channel input ignores alpha.
// Throws ConfigError for other channel counts, naming the count.
GrayImage to_grayscale(const Raster& img);

// Inverts the image when it is predominantly light (mean intensity > 127.5),
// otherwise returns it unchanged.
GrayImage normalize_polarity(const GrayImage& img);

// Minimal axis-aligned rectangle containing all pixels > bin_threshold.
// Throws EmptyGlyphError when nothing is above threshold.
GrayImage crop_to_content(const GrayImage& img, std::uint8_t bin_threshold = kDefaultBinThreshold);

// Bilinear resize to the standard 32x32 glyph size.
GrayImage resize_letter(const GrayImage& img);

// Full normalization: grayscale -> polarity -> crop -> resize.
GrayImage prep_letter(const Raster& img, std::uint8_t bin_threshold = kDefaultBinThreshold);

// Same pipeline for an image that is already single-channel.
GrayImage prep_letter_gray(const GrayImage& img, std::uint8_t bin_threshold = kDefaultBinThreshold);

// Loads root/{Normal,Reversal,Corrected}/*.png, normalizing every decodable
// image. Files are processed in lexicographic filename order per class;
// undecodable files are skipped and counted. Throws ConfigError when a class
// directory is missing.
LetterPool load_letter_pool(const std::filesystem::path& root,
                            std::uint8_t bin_threshold = kDefaultBinThreshold);

// Writes a pool back out using the same directory contract, one grayscale PNG
// per sample named <letter_id>_<index>.png.
void export_pool(const LetterPool& pool, const std::filesystem::path& root);

}  // namespace lexikit
