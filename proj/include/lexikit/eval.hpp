#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lexikit/annotation_io.hpp"
#include "lexikit/boxes.hpp"

namespace lexikit {

struct EvalConfig {
    std::vector<double> iou_thresholds;  // strictly increasing, each in (0,1)
    double conf_threshold = 0.25;        // fixed P/R/F1 operating point
    bool report_best_f1 = true;

    static std::vector<double> default_thresholds();  // 0.50, 0.55, ..., 0.95
    EvalConfig();
    void validate() const;
};

// Intersection-over-union of half-open pixel rectangles; 0 when disjoint.
double iou(const PixelBox& a, const PixelBox& b);

// Ground truth annotated with an image id so detections can never match
// across images.
struct EvalGt {
    GroundTruthBox gt;
    std::string image_id;
};

struct MatchResult {
    // Per detection (input order): matched ground-truth index or -1.
    std::vector<int> det_match;
    // Per ground truth: index of the matching detection or -1.
    std::vector<int> gt_match;
    // IoU of each detection's match (0 when unmatched).
    std::vector<double> det_iou;
    int true_positives = 0;
};

// Greedy matching for one class at one IoU threshold: detections of the class
// in descending confidence (ties by input order) take the unmatched same-class
// ground truth of highest IoU, provided IoU >= iou_thr. Detections and ground
// truths pair only within the same image_id.
MatchResult match_detections(const std::vector<Detection>& dets, const std::vector<EvalGt>& gts,
                             LetterClass cls, double iou_thr);

// All-point interpolated AP: precision envelope over the exact PR sweep,
// integrated in recall. 0 when the class has ground truth but no detections.
double average_precision(const std::vector<Detection>& dets, const std::vector<EvalGt>& gts,
                         LetterClass cls, double iou_thr);

struct OperatingPoint {
    double confidence = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct PrfResult {
    OperatingPoint per_class[kNumClasses];
    OperatingPoint macro;  // unweighted mean over classes with ground truth
};

// P/R/F1 with detections below conf_thr discarded. Vacuous-precision
// convention: precision is 1.0 when a class has no surviving detections.
PrfResult prf_at(const std::vector<Detection>& dets, const std::vector<EvalGt>& gts,
                 double iou_thr, double conf_thr);

// Sweeps every distinct confidence as a cut-off and returns the operating
// point maximizing F1 of the pooled (micro) counts; ties prefer the higher
// threshold. No detections gives F1 0 at the conventional threshold 1.0.
OperatingPoint best_f1(const std::vector<Detection>& dets, const std::vector<EvalGt>& gts,
                       double iou_thr);

struct ClassEval {
    int code = 0;
    std::string name;
    std::int64_t gt_count = 0;
    std::int64_t det_count = 0;
    std::vector<double> ap_by_threshold;
    double ap50 = 0.0;
    double ap_range = 0.0;  // mean over the threshold ladder
    OperatingPoint fixed;   // at cfg.conf_threshold, IoU = first threshold
    OperatingPoint best;    // per-class best-F1 sweep
};

struct MapSummary {
    double map50 = 0.0;
    double map_range = 0.0;
    std::vector<ClassEval> classes;
};

// Per-class AP at every threshold plus the two mAP aggregates. Classes with no
// ground truth are excluded from the means.
MapSummary map_range(const std::vector<Detection>& dets, const std::vector<EvalGt>& gts,
                     const EvalConfig& cfg);

struct EvalReport {
    MapSummary summary;
    OperatingPoint fixed_macro;
    OperatingPoint best_macro;
    std::string dataset_fingerprint;
    std::string predictions_root;
    std::string split;
    std::int64_t images = 0;
    std::vector<double> iou_thresholds;
    double conf_threshold = 0.25;
};

// Scores a predictions tree against one manifest split. Prediction files
// mirror label naming under predictions_root/<split>/; a missing file means
// "no detections" for that image. Prediction files for images outside the
// split are skipped with a warning; malformed files abort with ParseError.
EvalReport evaluate(const DatasetManifest& manifest, const std::filesystem::path& predictions_root,
                    const std::string& split, const EvalConfig& cfg = {});

// Table II-shaped text rendering (Class | Precision | Recall | mAP@0.5-0.95).
std::string render_report_table(const EvalReport& report);

void write_report_json(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_report_json(const std::filesystem::path& path);

}  // namespace lexikit
