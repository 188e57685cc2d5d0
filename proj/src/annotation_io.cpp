#include "lexikit/annotation_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lexikit/errors.hpp"
#include "lexikit/version.hpp"

namespace lexikit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_box_line(int class_code, const NormalizedBox& nb) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f %.6f", class_code, nb.cx, nb.cy, nb.w, nb.h);
    return buf;
}

// Parses one whitespace-separated label/prediction line. Returns the fields as
// doubles; arity and numeric errors carry the line number.
std::vector<double> parse_fields(const std::string& line, const std::string& file, int line_no,
                                 std::size_t expected) {
    std::istringstream ss(line);
    std::vector<double> fields;
    std::string tok;
    while (ss >> tok) {
        try {
            std::size_t used = 0;
            fields.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ParseError(file, line_no, "not a number: '" + tok + "'");
        }
    }
    if (fields.size() != expected)
        throw ParseError(file, line_no,
                         "expected " + std::to_string(expected) + " fields, got " +
                             std::to_string(fields.size()));
    return fields;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& l : lines) out << l << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void write_label_lines(const std::vector<GroundTruthBox>& boxes, int img_size,
                       const fs::path& path) {
    std::vector<std::string> lines;
    lines.reserve(boxes.size());
    for (const auto& gt : boxes)
        lines.push_back(format_box_line(static_cast<int>(gt.cls), to_normalized(gt.box, img_size)));
    write_lines(path, lines);
}

void write_labels(const WordScene& scene, const fs::path& path) {
    write_label_lines(scene.boxes, scene.canvas.width, path);
}

std::vector<GroundTruthBox> read_labels(const fs::path& path, int img_size) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<GroundTruthBox> boxes;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = parse_fields(line, path.string(), line_no, 5);
        const int code = static_cast<int>(f[0]);
        if (f[0] != code || code < 0 || code >= kNumClasses)
            throw ParseError(path.string(), line_no,
                             "class code " + std::to_string(f[0]) + " outside {0,1,2}");
        GroundTruthBox gt;
        gt.cls = static_cast<LetterClass>(code);
        gt.box = to_pixel({f[1], f[2], f[3], f[4]}, img_size);
        boxes.push_back(gt);
    }
    return boxes;
}

void write_predictions(const std::vector<Detection>& dets, int img_size, const fs::path& path) {
    std::vector<std::string> lines;
    lines.reserve(dets.size());
    for (const auto& d : dets) {
        char conf[32];
        std::snprintf(conf, sizeof(conf), " %.6f", d.confidence);
        lines.push_back(format_box_line(static_cast<int>(d.cls), to_normalized(d.box, img_size)) +
                        conf);
    }
    write_lines(path, lines);
}

std::vector<Detection> read_predictions(const fs::path& path, int img_size) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<Detection> dets;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = parse_fields(line, path.string(), line_no, 6);
        const int code = static_cast<int>(f[0]);
        if (f[0] != code || code < 0 || code >= kNumClasses)
            throw ParseError(path.string(), line_no,
                             "class code " + std::to_string(f[0]) + " outside {0,1,2}");
        if (f[5] < 0.0 || f[5] > 1.0)
            throw ParseError(path.string(), line_no,
                             "confidence " + std::to_string(f[5]) + " outside [0,1]");
        Detection d;
        d.cls = static_cast<LetterClass>(code);
        d.box = to_pixel({f[1], f[2], f[3], f[4]}, img_size);
        d.confidence = f[5];
        dets.push_back(d);
    }
    return dets;
}

const std::vector<ManifestEntry>& DatasetManifest::split(const std::string& name) const {
    for (int s = 0; s < 3; ++s)
        if (name == kSplitNames[s]) return splits[s];
    throw ConfigError("unknown split '" + name + "' (expected train, val, or test)");
}

void DatasetManifest::validate() const {
    const std::vector<std::string> expected = {"Normal", "Reversal", "Corrected"};
    if (class_names != expected)
        throw ConfigError("manifest class_names must be [Normal, Reversal, Corrected]");
    if (image_size < 1) throw ConfigError("manifest image_size must be >= 1");
    for (int s = 0; s < 3; ++s) {
        std::size_t images = 0, labels = 0;
        for (const auto& e : splits[s]) {
            if (!fs::exists(base_dir / e.image))
                throw ConfigError("manifest lists missing image " + e.image);
            ++images;
            if (!fs::exists(base_dir / e.label))
                throw ConfigError("manifest lists missing label " + e.label);
            ++labels;
        }
        if (images != labels)
            throw ConfigError(std::string("split ") + kSplitNames[s] +
                              " has mismatched image/label counts");
    }
}

void write_manifest(const DatasetManifest& m, const fs::path& path) {
    json j;
    j["format"] = "lexikit-manifest/1";
    j["class_names"] = m.class_names;
    j["image_size"] = m.image_size;
    j["master_seed"] = m.master_seed;
    j["fingerprint"] = {{"config_hash", m.config_hash}, {"tool_version", m.tool_version}};
    json splits = json::object();
    for (int s = 0; s < 3; ++s) {
        json arr = json::array();
        for (const auto& e : m.splits[s]) arr.push_back({{"image", e.image}, {"label", e.label}});
        splits[kSplitNames[s]] = std::move(arr);
    }
    j["splits"] = std::move(splits);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

DatasetManifest read_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    DatasetManifest m;
    try {
        m.class_names = j.at("class_names").get<std::vector<std::string>>();
        m.image_size = j.at("image_size").get<int>();
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        m.config_hash = j.at("fingerprint").at("config_hash").get<std::string>();
        m.tool_version = j.at("fingerprint").at("tool_version").get<std::string>();
        for (int s = 0; s < 3; ++s) {
            if (!j.at("splits").contains(kSplitNames[s])) continue;
            for (const auto& e : j.at("splits").at(kSplitNames[s]))
                m.splits[s].push_back(
                    {e.at("image").get<std::string>(), e.at("label").get<std::string>()});
        }
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    m.base_dir = path.parent_path();
    return m;
}

}  // namespace lexikit
