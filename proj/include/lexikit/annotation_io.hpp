#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lexikit/boxes.hpp"
#include "lexikit/word_composer.hpp"

namespace lexikit {

// Ground-truth label files: one line per box,
//   <class_code> <cx> <cy> <w> <h>
// fixed 6 decimal places, space separated, newline terminated, boxes in scene
// order. Prediction files carry a sixth <confidence> column.

void write_labels(const WordScene& scene, const std::filesystem::path& path);
void write_label_lines(const std::vector<GroundTruthBox>& boxes, int img_size,
                       const std::filesystem::path& path);

std::vector<GroundTruthBox> read_labels(const std::filesystem::path& path, int img_size);

void write_predictions(const std::vector<Detection>& dets, int img_size,
                       const std::filesystem::path& path);

std::vector<Detection> read_predictions(const std::filesystem::path& path, int img_size);

struct ManifestEntry {
    std::string image;  // relative to the manifest directory
    std::string label;
};

struct DatasetManifest {
    std::vector<std::string> class_names;  // fixed order, equal to LetterClass codes
    int image_size = 0;
    std::uint64_t master_seed = 0;
    std::string config_hash;
    std::string tool_version;
    std::vector<ManifestEntry> splits[3];  // indexed like kSplitNames
    std::filesystem::path base_dir;        // directory the manifest was loaded from

    const std::vector<ManifestEntry>& split(const std::string& name) const;

    // Checks class names, that every listed path exists, and that no split
    // lost label files relative to images. Throws ConfigError.
    void validate() const;
};

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace lexikit
