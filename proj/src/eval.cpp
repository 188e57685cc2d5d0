#include "lexikit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lexikit/errors.hpp"

namespace lexikit {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> EvalConfig::default_thresholds() {
    std::vector<double> t;
    for (int k = 0; k < 10; ++k) t.push_back((50 + 5 * k) / 100.0);
    return t;
}

EvalConfig::EvalConfig() : iou_thresholds(default_thresholds()) {}

void EvalConfig::validate() const {
    if (iou_thresholds.empty()) throw ConfigError("eval.iou_thresholds must be non-empty");
    for (std::size_t i = 0; i < iou_thresholds.size(); ++i) {
        if (iou_thresholds[i] <= 0.0 || iou_thresholds[i] >= 1.0)
            throw ConfigError("eval.iou_thresholds must lie in (0,1)");
        if (i > 0 && iou_thresholds[i] <= iou_thresholds[i - 1])
            throw ConfigError("eval.iou_thresholds must be strictly increasing");
    }
    if (conf_threshold < 0.0 || conf_threshold > 1.0)
        throw ConfigError("eval.conf_threshold must be in [0,1]");
}

double iou(const PixelBox& a, const PixelBox& b) {
    const double ix = std::max(0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
    const double iy = std::max(0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
    const double inter = ix * iy;
    const double uni = double(a.w) * a.h + double(b.w) * b.h - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

// Detection indices of one class in evaluation order: descending confidence,
// ties by input order.
std::vector<int> class_det_order(const std::vector<Detection>& dets, LetterClass cls) {
    std::vector<int> order;
    for (int i = 0; i < static_cast<int>(dets.size()); ++i)
        if (dets[i].cls == cls) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return dets[a].confidence > dets[b].confidence; });
    return order;
}

}  // namespace

MatchResult match_detections(const std::vector<Detection>& dets, const std::vector<EvalGt>& gts,
                             LetterClass cls, double iou_thr) {
    MatchResult result;
    result.det_match.assign(dets.size(), -1);
    result.gt_match.assign(gts.size(), -1);
    result.det_iou.assign(dets.size(), 0.0);

    // Candidate ground truths per image, input order preserved for tie-breaks.
    std::map<std::string, std::vector<int>> gts_by_image;
    for (int g = 0; g < static_cast<int>(gts.size()); ++g)
        if (gts[g].gt.cls == cls) gts_by_image[gts[g].image_id].push_back(g);

    for (int di : class_det_order(dets, cls)) {
        const auto it = gts_by_image.find(dets[di].image_id);
        if (it == gts_by_image.end()) continue;
        int best_gt = -1;
        double best_iou = 0.0;
        for (int g : it->second) {
            if (result.gt_match[g] >= 0) continue;
            const double v = iou(dets[di].box, gts[g].gt.box);
            if (v > best_iou) {
                best_iou = v;
                best_gt = g;
            }
        }
        if (best_gt >= 0 && best_iou >= iou_thr) {
            result.det_match[di] = best_gt;
            result.gt_match[best_gt] = di;
            result.det_iou[di] = best_iou;
            ++result.true_positives;
        }
    }
    return result;
}

double average_precision(const std::vector<Detection>& dets, const std::vector<EvalGt>& gts,
                         LetterClass cls, double iou_thr) {
    std::int64_t n_gt = 0;
    for (const auto& g : gts) n_gt += (g.gt.cls == cls) ? 1 : 0;
    if (n_gt == 0) return 0.0;

    const MatchResult match = match_detections(dets, gts, cls, iou_thr);
    const std::vector<int> order = class_det_order(dets, cls);
    if (order.empty()) return 0.0;

    // Exact PR sweep. Keeping the true-positive increments integral until one
    // final division makes a perfect detector score exactly 1.
    std::vector<std::int64_t> delta_tp(order.size());
    std::vector<double> precision(order.size());
    std::int64_t tp = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        delta_tp[k] = match.det_match[order[k]] >= 0 ? 1 : 0;
        tp += delta_tp[k];
        precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    }
    // Monotone envelope: p_env(k) = max over j >= k of precision(j).
    for (std::size_t k = order.size() - 1; k > 0; --k)
        precision[k - 1] = std::max(precision[k - 1], precision[k]);

    double weighted = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k)
        if (delta_tp[k]) weighted += precision[k];
    return weighted / static_cast<double>(n_gt);
}

namespace {

struct ClassCounts {
    std::int64_t gts = 0;
    // Per detection of the class, in evaluation order: (confidence, is_tp).
    std::vector<std::pair<double, bool>> sweep;
};

// Greedy matching is prefix-stable in confidence order: dropping a low
// confidence suffix never changes earlier matches, so one full sweep serves
// every confidence cut-off.
ClassCounts class_sweep(const std::vector<Detection>& dets, const std::vector<EvalGt>& gts,
                        LetterClass cls, double iou_thr) {
    ClassCounts out;
    for (const auto& g : gts) out.gts += (g.gt.cls == cls) ? 1 : 0;
    const MatchResult match = match_detections(dets, gts, cls, iou_thr);
    for (int di : class_det_order(dets, cls))
        out.sweep.emplace_back(dets[di].confidence, match.det_match[di] >= 0);
    return out;
}

OperatingPoint point_from_counts(double conf, std::int64_t tp, std::int64_t kept,
                                 std::int64_t n_gt) {
    OperatingPoint p;
    p.confidence = conf;
    p.precision = kept > 0 ? static_cast<double>(tp) / static_cast<double>(kept) : 1.0;
    p.recall = n_gt > 0 ? static_cast<double>(tp) / static_cast<double>(n_gt) : 1.0;
    p.f1 = (p.precision + p.recall > 0.0)
               ? 2.0 * p.precision * p.recall / (p.precision + p.recall)
               : 0.0;
    return p;
}

OperatingPoint mean_point(const std::vector<OperatingPoint>& pts) {
    OperatingPoint m;
    if (pts.empty()) {
        m.precision = m.recall = m.f1 = 1.0;
        m.confidence = 1.0;
        return m;
    }
    for (const auto& p : pts) {
        m.confidence += p.confidence;
        m.precision += p.precision;
        m.recall += p.recall;
        m.f1 += p.f1;
    }
    const double n = static_cast<double>(pts.size());
    m.confidence /= n;
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
    return m;
}

}  // namespace

PrfResult prf_at(const std::vector<Detection>& dets, const std::vector<EvalGt>& gts,
                 double iou_thr, double conf_thr) {
    PrfResult result;
    std::vector<OperatingPoint> present;
    for (int c = 0; c < kNumClasses; ++c) {
        const ClassCounts counts = class_sweep(dets, gts, static_cast<LetterClass>(c), iou_thr);
        std::int64_t tp = 0, kept = 0;
        for (const auto& [conf, is_tp] : counts.sweep) {
            if (conf < conf_thr) break;  // sweep is sorted descending
            ++kept;
            tp += is_tp ? 1 : 0;
        }
        result.per_class[c] = point_from_counts(conf_thr, tp, kept, counts.gts);
        if (counts.gts > 0) present.push_back(result.per_class[c]);
    }
    result.macro = mean_point(present);
    result.macro.confidence = conf_thr;
    return result;
}

OperatingPoint best_f1(const std::vector<Detection>& dets, const std::vector<EvalGt>& gts,
                       double iou_thr) {
    std::int64_t total_gts = 0;
    ClassCounts counts[kNumClasses];
    std::vector<double> candidates;
    for (int c = 0; c < kNumClasses; ++c) {
        counts[c] = class_sweep(dets, gts, static_cast<LetterClass>(c), iou_thr);
        total_gts += counts[c].gts;
        for (const auto& [conf, tp] : counts[c].sweep) candidates.push_back(conf);
    }
    if (candidates.empty()) {
        OperatingPoint p = point_from_counts(1.0, 0, 0, total_gts);
        if (total_gts > 0) p.recall = 0.0;
        p.f1 = 0.0;
        return p;
    }
    std::sort(candidates.begin(), candidates.end(), std::greater<>());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    OperatingPoint best;
    bool first = true;
    for (const double cut : candidates) {  // descending: later candidates only win strictly
        std::int64_t tp = 0, kept = 0;
        for (const auto& cc : counts) {
            for (const auto& [conf, is_tp] : cc.sweep) {
                if (conf < cut) break;
                ++kept;
                tp += is_tp ? 1 : 0;
            }
        }
        const OperatingPoint p = point_from_counts(cut, tp, kept, total_gts);
        if (first || p.f1 > best.f1) {
            best = p;
            first = false;
        }
    }
    return best;
}

MapSummary map_range(const std::vector<Detection>& dets, const std::vector<EvalGt>& gts,
                     const EvalConfig& cfg) {
    cfg.validate();
    MapSummary summary;
    double map50_sum = 0.0, range_sum = 0.0;
    int present = 0;

    for (int c = 0; c < kNumClasses; ++c) {
        const auto cls = static_cast<LetterClass>(c);
        ClassEval ce;
        ce.code = c;
        ce.name = class_name(cls);
        for (const auto& g : gts) ce.gt_count += (g.gt.cls == cls) ? 1 : 0;
        for (const auto& d : dets) ce.det_count += (d.cls == cls) ? 1 : 0;

        double sum = 0.0;
        for (const double thr : cfg.iou_thresholds) {
            const double ap = average_precision(dets, gts, cls, thr);
            ce.ap_by_threshold.push_back(ap);
            sum += ap;
        }
        ce.ap50 = ce.ap_by_threshold.front();
        ce.ap_range = sum / static_cast<double>(cfg.iou_thresholds.size());

        if (ce.gt_count > 0) {
            map50_sum += ce.ap50;
            range_sum += ce.ap_range;
            ++present;
        }
        summary.classes.push_back(std::move(ce));
    }
    summary.map50 = present > 0 ? map50_sum / present : 0.0;
    summary.map_range = present > 0 ? range_sum / present : 0.0;
    return summary;
}

EvalReport evaluate(const DatasetManifest& manifest, const fs::path& predictions_root,
                    const std::string& split, const EvalConfig& cfg) {
    cfg.validate();
    manifest.validate();
    const auto& entries = manifest.split(split);

    std::vector<EvalGt> gts;
    std::vector<Detection> dets;
    std::map<std::string, bool> in_split;
    bool warned_missing = false;

    for (const auto& entry : entries) {
        const fs::path label_path = manifest.base_dir / entry.label;
        const std::string image_id = label_path.stem().string();
        in_split[image_id] = true;

        for (auto& gt : read_labels(label_path, manifest.image_size))
            gts.push_back({std::move(gt), image_id});

        const fs::path pred_path = predictions_root / split / (image_id + ".txt");
        if (!fs::exists(pred_path)) {
            if (!warned_missing) {
                std::cerr << "warning: no prediction file for " << image_id
                          << " (treating missing files as empty)\n";
                warned_missing = true;
            }
            continue;
        }
        for (auto& d : read_predictions(pred_path, manifest.image_size)) {
            d.image_id = image_id;
            dets.push_back(std::move(d));
        }
    }

    // Prediction files for images outside the split are skipped with a warning.
    const fs::path pred_dir = predictions_root / split;
    if (fs::is_directory(pred_dir)) {
        for (const auto& e : fs::directory_iterator(pred_dir)) {
            if (!e.is_regular_file() || e.path().extension() != ".txt") continue;
            const std::string stem = e.path().stem().string();
            if (!in_split.count(stem))
                std::cerr << "warning: prediction " << e.path().filename().string()
                          << " has no image in split '" << split << "', skipped\n";
        }
    }

    EvalReport report;
    report.summary = map_range(dets, gts, cfg);
    const double iou_op = cfg.iou_thresholds.front();
    const PrfResult fixed = prf_at(dets, gts, iou_op, cfg.conf_threshold);
    for (int c = 0; c < kNumClasses; ++c) report.summary.classes[c].fixed = fixed.per_class[c];
    report.fixed_macro = fixed.macro;

    if (cfg.report_best_f1) {
        std::vector<OperatingPoint> present;
        for (int c = 0; c < kNumClasses; ++c) {
            const auto cls = static_cast<LetterClass>(c);
            std::vector<Detection> cdets;
            std::vector<EvalGt> cgts;
            for (const auto& d : dets)
                if (d.cls == cls) cdets.push_back(d);
            for (const auto& g : gts)
                if (g.gt.cls == cls) cgts.push_back(g);
            report.summary.classes[c].best = best_f1(cdets, cgts, iou_op);
            if (!cgts.empty()) present.push_back(report.summary.classes[c].best);
        }
        report.best_macro = mean_point(present);
    }

    report.dataset_fingerprint = manifest.config_hash;
    report.predictions_root = predictions_root.string();
    report.split = split;
    report.images = static_cast<std::int64_t>(entries.size());
    report.iou_thresholds = cfg.iou_thresholds;
    report.conf_threshold = cfg.conf_threshold;
    return report;
}

std::string render_report_table(const EvalReport& report) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-10s %10s %10s %14s\n", "Class", "Precision", "Recall",
                  "mAP@0.5-0.95");
    out << line;
    for (const auto& ce : report.summary.classes) {
        std::snprintf(line, sizeof(line), "%-10s %10.4f %10.4f %14.4f\n", ce.name.c_str(),
                      ce.fixed.precision, ce.fixed.recall, ce.ap_range);
        out << line;
    }
    std::snprintf(line, sizeof(line), "%-10s %10.4f %10.4f %14.4f\n", "all",
                  report.fixed_macro.precision, report.fixed_macro.recall,
                  report.summary.map_range);
    out << line;
    std::snprintf(line, sizeof(line),
                  "\nmAP@0.5 %.4f | mAP@0.5-0.95 %.4f | P/R at conf>=%.2f, IoU=%.2f\n",
                  report.summary.map50, report.summary.map_range, report.conf_threshold,
                  report.iou_thresholds.empty() ? 0.5 : report.iou_thresholds.front());
    out << line;
    std::snprintf(line, sizeof(line), "best-F1 %.4f at conf %.4f (P %.4f, R %.4f)\n",
                  report.best_macro.f1, report.best_macro.confidence, report.best_macro.precision,
                  report.best_macro.recall);
    out << line;
    return out.str();
}

namespace {

json point_to_json(const OperatingPoint& p) {
    return {{"conf", p.confidence}, {"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

OperatingPoint point_from_json(const json& j) {
    OperatingPoint p;
    p.confidence = j.at("conf").get<double>();
    p.precision = j.at("precision").get<double>();
    p.recall = j.at("recall").get<double>();
    p.f1 = j.at("f1").get<double>();
    return p;
}

}  // namespace

void write_report_json(const EvalReport& report, const fs::path& path) {
    json classes = json::array();
    for (const auto& ce : report.summary.classes) {
        classes.push_back({{"name", ce.name},
                           {"code", ce.code},
                           {"gt_count", ce.gt_count},
                           {"det_count", ce.det_count},
                           {"ap_by_threshold", ce.ap_by_threshold},
                           {"ap50", ce.ap50},
                           {"ap_range", ce.ap_range},
                           {"fixed", point_to_json(ce.fixed)},
                           {"best", point_to_json(ce.best)}});
    }
    const json j = {{"format", "lexikit-report/1"},
                    {"dataset_fingerprint", report.dataset_fingerprint},
                    {"predictions_root", report.predictions_root},
                    {"split", report.split},
                    {"images", report.images},
                    {"iou_thresholds", report.iou_thresholds},
                    {"conf_threshold", report.conf_threshold},
                    {"map50", report.summary.map50},
                    {"map_range", report.summary.map_range},
                    {"macro", {{"fixed", point_to_json(report.fixed_macro)},
                               {"best", point_to_json(report.best_macro)}}},
                    {"classes", classes}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

EvalReport read_report_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    EvalReport r;
    try {
        r.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
        r.predictions_root = j.at("predictions_root").get<std::string>();
        r.split = j.at("split").get<std::string>();
        r.images = j.at("images").get<std::int64_t>();
        r.iou_thresholds = j.at("iou_thresholds").get<std::vector<double>>();
        r.conf_threshold = j.at("conf_threshold").get<double>();
        r.summary.map50 = j.at("map50").get<double>();
        r.summary.map_range = j.at("map_range").get<double>();
        r.fixed_macro = point_from_json(j.at("macro").at("fixed"));
        r.best_macro = point_from_json(j.at("macro").at("best"));
        for (const auto& cj : j.at("classes")) {
            ClassEval ce;
            ce.name = cj.at("name").get<std::string>();
            ce.code = cj.at("code").get<int>();
            ce.gt_count = cj.at("gt_count").get<std::int64_t>();
            ce.det_count = cj.at("det_count").get<std::int64_t>();
            ce.ap_by_threshold = cj.at("ap_by_threshold").get<std::vector<double>>();
            ce.ap50 = cj.at("ap50").get<double>();
            ce.ap_range = cj.at("ap_range").get<double>();
            ce.fixed = point_from_json(cj.at("fixed"));
            ce.best = point_from_json(cj.at("best"));
            r.summary.classes.push_back(std::move(ce));
        }
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return r;
}

}  // namespace lexikit
