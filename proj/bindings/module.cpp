// Python bindings for the core pipeline: letter prep, glyph synthesis, scene
// composition, the baseline detector, and the evaluation protocol.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lexikit/annotation_io.hpp"
#include "lexikit/baseline_detector.hpp"
#include "lexikit/errors.hpp"
#include "lexikit/eval.hpp"
#include "lexikit/glyph_synth.hpp"
#include "lexikit/letter_prep.hpp"
#include "lexikit/version.hpp"
#include "lexikit/word_composer.hpp"

namespace py = pybind11;
using namespace lexikit;

namespace {

py::array_t<std::uint8_t> to_numpy(const GrayImage& img) {
    py::array_t<std::uint8_t> arr({img.height, img.width});
    std::memcpy(arr.mutable_data(), img.pixels.data(), img.pixels.size());
    return arr;
}

GrayImage gray_from_numpy(const py::array& arr) {
    const auto a = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(arr);
    if (!a || a.ndim() != 2) throw ConfigError("expected a 2-D uint8 array");
    GrayImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::memcpy(img.pixels.data(), a.data(), img.pixels.size());
    return img;
}

Raster raster_from_numpy(const py::array& arr) {
    const auto a = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(arr);
    if (!a || (a.ndim() != 2 && a.ndim() != 3)) throw ConfigError("expected a 2-D or 3-D uint8 array");
    Raster r;
    r.height = static_cast<int>(a.shape(0));
    r.width = static_cast<int>(a.shape(1));
    r.channels = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
    r.pixels.resize(static_cast<std::size_t>(r.width) * r.height * r.channels);
    std::memcpy(r.pixels.data(), a.data(), r.pixels.size());
    return r;
}

PixelBox box_from_tuple(const py::tuple& t) {
    if (t.size() != 4) throw ConfigError("box must be (x, y, w, h)");
    return {t[0].cast<int>(), t[1].cast<int>(), t[2].cast<int>(), t[3].cast<int>()};
}

py::tuple box_to_tuple(const PixelBox& b) { return py::make_tuple(b.x, b.y, b.w, b.h); }

py::dict gt_to_dict(const GroundTruthBox& gt) {
    py::dict d;
    d["box"] = box_to_tuple(gt.box);
    d["cls"] = static_cast<int>(gt.cls);
    d["letter"] = gt.letter_id;
    return d;
}

py::dict det_to_dict(const Detection& det) {
    py::dict d;
    d["box"] = box_to_tuple(det.box);
    d["cls"] = static_cast<int>(det.cls);
    d["confidence"] = det.confidence;
    if (!det.image_id.empty()) d["image_id"] = det.image_id;
    return d;
}

Detection det_from_dict(const py::dict& d) {
    Detection det;
    det.box = box_from_tuple(d["box"].cast<py::tuple>());
    det.cls = class_from_code(d["cls"].cast<int>());
    det.confidence = d["confidence"].cast<double>();
    if (d.contains("image_id")) det.image_id = d["image_id"].cast<std::string>();
    return det;
}

EvalGt evalgt_from_dict(const py::dict& d) {
    EvalGt g;
    g.gt.box = box_from_tuple(d["box"].cast<py::tuple>());
    g.gt.cls = class_from_code(d["cls"].cast<int>());
    if (d.contains("image_id")) g.image_id = d["image_id"].cast<std::string>();
    return g;
}

std::vector<Detection> dets_from_list(const py::list& list) {
    std::vector<Detection> dets;
    for (const auto& item : list) dets.push_back(det_from_dict(item.cast<py::dict>()));
    return dets;
}

std::vector<EvalGt> gts_from_list(const py::list& list) {
    std::vector<EvalGt> gts;
    for (const auto& item : list) gts.push_back(evalgt_from_dict(item.cast<py::dict>()));
    return gts;
}

SynthConfig synth_config(std::uint64_t seed, const std::string& alphabet, double jitter_px,
                         std::pair<double, double> width_range, double ghost_alpha,
                         double artifact_probability, std::pair<int, int> overdraw,
                         int render_size) {
    SynthConfig cfg;
    cfg.rng_seed = seed;
    cfg.alphabet = alphabet;
    cfg.jitter_px = jitter_px;
    cfg.width_min = width_range.first;
    cfg.width_max = width_range.second;
    cfg.correction_ghost_alpha = ghost_alpha;
    cfg.artifact_probability = artifact_probability;
    cfg.overdraw_min = overdraw.first;
    cfg.overdraw_max = overdraw.second;
    cfg.render_size = render_size;
    return cfg;
}

ComposerConfig composer_config(std::uint64_t seed, int canvas_size, std::pair<int, int> word_len,
                               int base_letter_size, std::pair<int, int> gap_range, int margin,
                               std::tuple<double, double, double> mixture, bool augment,
                               double rotation_deg, double translate_ratio, double scale_delta,
                               int words_per_image) {
    ComposerConfig cfg;
    cfg.rng_seed = seed;
    cfg.canvas_size = canvas_size;
    cfg.min_len = word_len.first;
    cfg.max_len = word_len.second;
    cfg.base_letter_size = base_letter_size;
    cfg.gap_min = gap_range.first;
    cfg.gap_max = gap_range.second;
    cfg.margin = margin;
    cfg.mixture.p_normal = std::get<0>(mixture);
    cfg.mixture.p_reversal = std::get<1>(mixture);
    cfg.mixture.p_corrected = std::get<2>(mixture);
    cfg.augment.enabled = augment;
    cfg.augment.rotation_deg = rotation_deg;
    cfg.augment.translate_ratio = translate_ratio;
    cfg.augment.scale_delta = scale_delta;
    cfg.words_per_image = words_per_image;
    return cfg;
}

py::dict point_to_dict(const OperatingPoint& p) {
    py::dict d;
    d["conf"] = p.confidence;
    d["precision"] = p.precision;
    d["recall"] = p.recall;
    d["f1"] = p.f1;
    return d;
}

py::dict report_to_dict(const EvalReport& report) {
    py::dict d;
    d["map50"] = report.summary.map50;
    d["map_range"] = report.summary.map_range;
    d["images"] = report.images;
    d["split"] = report.split;
    d["iou_thresholds"] = report.iou_thresholds;
    d["conf_threshold"] = report.conf_threshold;
    d["dataset_fingerprint"] = report.dataset_fingerprint;
    d["macro"] = py::dict(py::arg("fixed") = point_to_dict(report.fixed_macro),
                          py::arg("best") = point_to_dict(report.best_macro));
    py::list classes;
    for (const auto& ce : report.summary.classes) {
        py::dict c;
        c["name"] = ce.name;
        c["code"] = ce.code;
        c["gt_count"] = ce.gt_count;
        c["det_count"] = ce.det_count;
        c["ap_by_threshold"] = ce.ap_by_threshold;
        c["ap50"] = ce.ap50;
        c["ap_range"] = ce.ap_range;
        c["fixed"] = point_to_dict(ce.fixed);
        c["best"] = point_to_dict(ce.best);
        classes.append(c);
    }
    d["classes"] = classes;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Synthetic dyslexia-handwriting scenes and detection evaluation";
    m.attr("__version__") = kVersion;
    m.attr("LETTER_SIZE") = kLetterSize;
    m.attr("CLASS_NAMES") = std::vector<std::string>{"Normal", "Reversal", "Corrected"};

    py::register_exception<Error>(m, "LexikitError", PyExc_RuntimeError);

    py::class_<LetterPool>(m, "LetterPool")
        .def("count", [](const LetterPool& p, int cls) { return p.count(class_from_code(cls)); })
        .def_readonly("skipped", &LetterPool::skipped)
        .def("sample",
             [](const LetterPool& p, int cls, std::size_t i) {
                 const auto& list = p.by_class(class_from_code(cls));
                 if (i >= list.size()) throw py::index_error();
                 py::dict d;
                 d["image"] = to_numpy(list[i].image);
                 d["letter"] = list[i].letter_id;
                 d["cls"] = static_cast<int>(list[i].cls);
                 d["source"] = list[i].source;
                 return d;
             },
             py::arg("cls"), py::arg("index"))
        .def("export", [](const LetterPool& p, const std::filesystem::path& dir) {
            export_pool(p, dir);
        }, py::arg("directory"));

    m.def("synth_pool",
          [](int per_class_count, std::uint64_t seed, const std::string& alphabet,
             double jitter_px, std::pair<double, double> width_range, double ghost_alpha,
             double artifact_probability, std::pair<int, int> overdraw, int render_size) {
              return synth_pool(synth_config(seed, alphabet, jitter_px, width_range, ghost_alpha,
                                             artifact_probability, overdraw, render_size),
                                per_class_count);
          },
          py::arg("per_class_count"), py::arg("seed") = 0, py::arg("alphabet") = "befkrs",
          py::arg("jitter_px") = 0.9, py::arg("width_range") = std::make_pair(0.05, 0.09),
          py::arg("correction_ghost_alpha") = 0.35, py::arg("artifact_probability") = 1.0,
          py::arg("overdraw_strokes") = std::make_pair(1, 3), py::arg("render_size") = 64,
          "Procedurally generate a letter pool (per-class sample lists).");

    m.def("load_pool", &load_letter_pool, py::arg("directory"),
          py::arg("bin_threshold") = kDefaultBinThreshold,
          "Load and normalize a Normal/Reversal/Corrected directory tree.");

    m.def("prep_letter",
          [](const py::array& raster, int bin_threshold) {
              return to_numpy(prep_letter(raster_from_numpy(raster),
                                          static_cast<std::uint8_t>(bin_threshold)));
          },
          py::arg("image"), py::arg("bin_threshold") = int(kDefaultBinThreshold),
          "Normalize a letter image to the standard 32x32 ink-on-black form.");

    m.def("mirror",
          [](const py::array& img) { return to_numpy(mirror(gray_from_numpy(img))); },
          py::arg("image"), "Horizontal flip.");

    m.def("compose_scene",
          [](const LetterPool& pool, std::int64_t scene_id, std::uint64_t seed, int canvas_size,
             std::pair<int, int> word_len, int base_letter_size, std::pair<int, int> gap_range,
             int margin, std::tuple<double, double, double> mixture, bool augment,
             double rotation_deg, double translate_ratio, double scale_delta,
             int words_per_image) {
              const ComposerConfig cfg = composer_config(
                  seed, canvas_size, word_len, base_letter_size, gap_range, margin, mixture,
                  augment, rotation_deg, translate_ratio, scale_delta, words_per_image);
              cfg.validate();
              const WordScene scene = compose_scene(pool, cfg, scene_id);
              py::list boxes;
              for (const auto& gt : scene.boxes) boxes.append(gt_to_dict(gt));
              return py::make_tuple(to_numpy(scene.canvas), boxes);
          },
          py::arg("pool"), py::arg("scene_id") = 0, py::arg("seed") = 0,
          py::arg("canvas_size") = 640, py::arg("word_len") = std::make_pair(2, 7),
          py::arg("base_letter_size") = 64, py::arg("gap_range") = std::make_pair(18, 25),
          py::arg("margin") = 8, py::arg("mixture") = std::make_tuple(0.40, 0.30, 0.30),
          py::arg("augment") = false, py::arg("rotation_deg") = 5.0,
          py::arg("translate_ratio") = 0.1, py::arg("scale_delta") = 0.2,
          py::arg("words_per_image") = 1,
          "Compose one word scene; returns (canvas, ground_truth_boxes).");

    m.def("generate_dataset",
          [](const LetterPool& pool, const std::filesystem::path& out_dir, std::int64_t n_images,
             std::tuple<double, double, double> split, int workers, std::uint64_t seed,
             int canvas_size, std::pair<int, int> word_len, int base_letter_size,
             std::pair<int, int> gap_range, int margin,
             std::tuple<double, double, double> mixture, bool augment, double rotation_deg,
             double translate_ratio, double scale_delta, int words_per_image) {
              const ComposerConfig cfg = composer_config(
                  seed, canvas_size, word_len, base_letter_size, gap_range, margin, mixture,
                  augment, rotation_deg, translate_ratio, scale_delta, words_per_image);
              const SplitFractions fr{std::get<0>(split), std::get<1>(split), std::get<2>(split)};
              return generate_dataset(pool, cfg, n_images, fr, out_dir, workers).manifest;
          },
          py::arg("pool"), py::arg("out_dir"), py::arg("n_images"),
          py::arg("split") = std::make_tuple(0.8, 0.2, 0.0), py::arg("workers") = 0,
          py::arg("seed") = 0, py::arg("canvas_size") = 640,
          py::arg("word_len") = std::make_pair(2, 7), py::arg("base_letter_size") = 64,
          py::arg("gap_range") = std::make_pair(18, 25), py::arg("margin") = 8,
          py::arg("mixture") = std::make_tuple(0.40, 0.30, 0.30), py::arg("augment") = false,
          py::arg("rotation_deg") = 5.0, py::arg("translate_ratio") = 0.1,
          py::arg("scale_delta") = 0.2, py::arg("words_per_image") = 1,
          "Write a full image/label/manifest dataset; returns the manifest path.");

    m.def("detect_image",
          [](const py::array& canvas, const LetterPool& templates, int bin_threshold,
             std::int64_t min_component_area) {
              DetectorParams params;
              params.bin_threshold = static_cast<std::uint8_t>(bin_threshold);
              params.min_component_area = min_component_area;
              const auto dets =
                  detect(gray_from_numpy(canvas), TemplateBank::from_pool(templates), params);
              py::list out;
              for (const auto& d : dets) out.append(det_to_dict(d));
              return out;
          },
          py::arg("canvas"), py::arg("templates"), py::arg("bin_threshold") = 128,
          py::arg("min_component_area") = 16,
          "Run the connected-component + nearest-template detector on one image.");

    m.def("detect_dataset",
          [](const std::filesystem::path& manifest_path, const std::string& split,
             const LetterPool& templates, const std::filesystem::path& out_root, int bin_threshold,
             std::int64_t min_component_area, int workers) {
              const DatasetManifest manifest = read_manifest(manifest_path);
              manifest.validate();
              DetectorParams params;
              params.bin_threshold = static_cast<std::uint8_t>(bin_threshold);
              params.min_component_area = min_component_area;
              detect_dataset(manifest, split, TemplateBank::from_pool(templates), params, out_root,
                             workers);
          },
          py::arg("manifest"), py::arg("split"), py::arg("templates"), py::arg("out_root"),
          py::arg("bin_threshold") = 128, py::arg("min_component_area") = 16,
          py::arg("workers") = 0,
          "Detect over a manifest split, writing prediction files under out_root/<split>/.");

    m.def("iou",
          [](const py::tuple& a, const py::tuple& b) {
              return iou(box_from_tuple(a), box_from_tuple(b));
          },
          py::arg("a"), py::arg("b"), "Intersection-over-union of (x, y, w, h) boxes.");

    m.def("match_detections",
          [](const py::list& dets, const py::list& gts, int cls, double iou_thr) {
              const MatchResult r =
                  match_detections(dets_from_list(dets), gts_from_list(gts), class_from_code(cls),
                                   iou_thr);
              py::dict d;
              d["det_match"] = r.det_match;
              d["gt_match"] = r.gt_match;
              d["det_iou"] = r.det_iou;
              d["true_positives"] = r.true_positives;
              return d;
          },
          py::arg("detections"), py::arg("ground_truths"), py::arg("cls"), py::arg("iou_thr"),
          "Greedy same-class matching at one IoU threshold.");

    m.def("average_precision",
          [](const py::list& dets, const py::list& gts, int cls, double iou_thr) {
              return average_precision(dets_from_list(dets), gts_from_list(gts),
                                       class_from_code(cls), iou_thr);
          },
          py::arg("detections"), py::arg("ground_truths"), py::arg("cls"), py::arg("iou_thr"),
          "All-point interpolated AP for one class at one IoU threshold.");

    m.def("evaluate",
          [](const std::filesystem::path& manifest_path,
             const std::filesystem::path& predictions_root, const std::string& split,
             double conf_threshold, std::optional<std::vector<double>> iou_thresholds) {
              EvalConfig cfg;
              cfg.conf_threshold = conf_threshold;
              if (iou_thresholds) cfg.iou_thresholds = *iou_thresholds;
              const EvalReport report =
                  evaluate(read_manifest(manifest_path), predictions_root, split, cfg);
              return report_to_dict(report);
          },
          py::arg("manifest"), py::arg("predictions_root"), py::arg("split") = "val",
          py::arg("conf_threshold") = 0.25, py::arg("iou_thresholds") = py::none(),
          "Score a predictions tree against a manifest split; returns the report as a dict.");

    m.def("read_labels",
          [](const std::filesystem::path& path, int img_size) {
              py::list out;
              for (const auto& gt : read_labels(path, img_size)) out.append(gt_to_dict(gt));
              return out;
          },
          py::arg("path"), py::arg("img_size"), "Parse a ground-truth label file.");

    m.def("read_predictions",
          [](const std::filesystem::path& path, int img_size) {
              py::list out;
              for (const auto& d : read_predictions(path, img_size)) out.append(det_to_dict(d));
              return out;
          },
          py::arg("path"), py::arg("img_size"), "Parse a prediction file.");
}
