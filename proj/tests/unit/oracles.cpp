#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "lexikit/rng.hpp"

namespace oracle {

using namespace lexikit;

GrayImage bilinear(const GrayImage& img, int out_w, int out_h) {
    GrayImage out(out_w, out_h);
    auto pix = [&](double x, double y) -> double {
        const int xi = std::max(0, std::min(img.width - 1, static_cast<int>(x)));
        const int yi = std::max(0, std::min(img.height - 1, static_cast<int>(y)));
        return img.at(xi, yi);
    };
    for (int oy = 0; oy < out_h; ++oy) {
        for (int ox = 0; ox < out_w; ++ox) {
            double sx = (ox + 0.5) * img.width / out_w - 0.5;
            double sy = (oy + 0.5) * img.height / out_h - 0.5;
            sx = std::min(std::max(sx, 0.0), img.width - 1.0);
            sy = std::min(std::max(sy, 0.0), img.height - 1.0);
            const double x0 = std::floor(sx), y0 = std::floor(sy);
            const double fx = sx - x0, fy = sy - y0;
            const double v = pix(x0, y0) * (1 - fx) * (1 - fy) + pix(x0 + 1, y0) * fx * (1 - fy) +
                             pix(x0, y0 + 1) * (1 - fx) * fy + pix(x0 + 1, y0 + 1) * fx * fy;
            out.at(ox, oy) = static_cast<std::uint8_t>(std::llround(v));
        }
    }
    return out;
}

Bounds content_bounds(const GrayImage& img, std::uint8_t thr) {
    Bounds b{0, 0, 0, 0, false};
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (img.at(x, y) <= thr) continue;
            if (!b.found) {
                b = {x, y, x, y, true};
            } else {
                b.min_x = std::min(b.min_x, x);
                b.min_y = std::min(b.min_y, y);
                b.max_x = std::max(b.max_x, x);
                b.max_y = std::max(b.max_y, y);
            }
        }
    }
    return b;
}

std::vector<std::vector<std::pair<int, int>>> flood_components(const std::vector<std::uint8_t>& mask,
                                                               int w, int h) {
    std::vector<int> seen(mask.size(), 0);
    std::vector<std::vector<std::pair<int, int>>> comps;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask[static_cast<std::size_t>(y) * w + x] || seen[static_cast<std::size_t>(y) * w + x])
                continue;
            std::vector<std::pair<int, int>> comp;
            std::deque<std::pair<int, int>> queue{{x, y}};
            seen[static_cast<std::size_t>(y) * w + x] = 1;
            while (!queue.empty()) {
                const auto [cx, cy] = queue.front();
                queue.pop_front();
                comp.emplace_back(cx, cy);
                for (int ny = cy - 1; ny <= cy + 1; ++ny) {
                    for (int nx = cx - 1; nx <= cx + 1; ++nx) {
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        const std::size_t idx = static_cast<std::size_t>(ny) * w + nx;
                        if (mask[idx] && !seen[idx]) {
                            seen[idx] = 1;
                            queue.emplace_back(nx, ny);
                        }
                    }
                }
            }
            std::sort(comp.begin(), comp.end(), [](const auto& a, const auto& b) {
                return a.second != b.second ? a.second < b.second : a.first < b.first;
            });
            comps.push_back(std::move(comp));
        }
    }
    std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) {
        int a_min_x = a[0].first, b_min_x = b[0].first;
        for (const auto& p : a) a_min_x = std::min(a_min_x, p.first);
        for (const auto& p : b) b_min_x = std::min(b_min_x, p.first);
        if (a[0].second != b[0].second) return a[0].second < b[0].second;
        return a_min_x < b_min_x;
    });
    return comps;
}

double iou_by_pixel_count(const PixelBox& a, const PixelBox& b) {
    std::int64_t inter = 0;
    for (int y = std::max(a.y, b.y); y < std::min(a.y + a.h, b.y + b.h); ++y)
        for (int x = std::max(a.x, b.x); x < std::min(a.x + a.w, b.x + b.w); ++x) ++inter;
    const std::int64_t uni =
        static_cast<std::int64_t>(a.w) * a.h + static_cast<std::int64_t>(b.w) * b.h - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

namespace {

std::vector<int> confidence_order(const std::vector<Detection>& dets, LetterClass cls) {
    std::vector<int> order;
    for (int i = 0; i < static_cast<int>(dets.size()); ++i)
        if (dets[i].cls == cls) order.push_back(i);
    // insertion sort keeps input order on ties
    for (std::size_t i = 1; i < order.size(); ++i) {
        const int key = order[i];
        std::size_t j = i;
        while (j > 0 && dets[order[j - 1]].confidence < dets[key].confidence) {
            order[j] = order[j - 1];
            --j;
        }
        order[j] = key;
    }
    return order;
}

}  // namespace

std::vector<int> greedy_match(const std::vector<Detection>& dets, const std::vector<EvalGt>& gts,
                              LetterClass cls, double iou_thr) {
    std::vector<int> det_match(dets.size(), -1);
    std::vector<bool> gt_taken(gts.size(), false);
    for (int di : confidence_order(dets, cls)) {
        int best = -1;
        double best_iou = 0.0;
        for (int g = 0; g < static_cast<int>(gts.size()); ++g) {
            if (gt_taken[g] || gts[g].gt.cls != cls || gts[g].image_id != dets[di].image_id) continue;
            const double v = iou_by_pixel_count(dets[di].box, gts[g].gt.box);
            if (v > best_iou) {
                best_iou = v;
                best = g;
            }
        }
        if (best >= 0 && best_iou >= iou_thr) {
            det_match[di] = best;
            gt_taken[best] = true;
        }
    }
    return det_match;
}

double average_precision(const std::vector<Detection>& dets, const std::vector<EvalGt>& gts,
                         LetterClass cls, double iou_thr) {
    std::int64_t n_gt = 0;
    for (const auto& g : gts) n_gt += (g.gt.cls == cls) ? 1 : 0;
    if (n_gt == 0) return 0.0;
    const std::vector<int> order = confidence_order(dets, cls);
    if (order.empty()) return 0.0;

    // Fresh matching for every prefix size.
    std::vector<double> precision, recall;
    for (std::size_t k = 1; k <= order.size(); ++k) {
        std::vector<Detection> prefix;
        for (std::size_t i = 0; i < k; ++i) prefix.push_back(dets[order[i]]);
        const std::vector<int> match = greedy_match(prefix, gts, cls, iou_thr);
        std::int64_t tp = 0;
        for (int m : match) tp += (m >= 0) ? 1 : 0;
        precision.push_back(static_cast<double>(tp) / static_cast<double>(k));
        recall.push_back(static_cast<double>(tp) / static_cast<double>(n_gt));
    }

    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t k = 0; k < precision.size(); ++k) {
        double envelope = 0.0;
        for (std::size_t j = k; j < precision.size(); ++j) envelope = std::max(envelope, precision[j]);
        ap += (recall[k] - prev_recall) * envelope;
        prev_recall = recall[k];
    }
    return ap;
}

std::vector<int> split_assignment(std::uint64_t seed, std::int64_t n, const SplitFractions& split) {
    const double fr[3] = {split.train, split.val, split.test};
    std::int64_t quota[3];
    double rem[3];
    std::int64_t total = 0;
    for (int i = 0; i < 3; ++i) {
        const double exact = fr[i] * static_cast<double>(n);
        quota[i] = static_cast<std::int64_t>(std::floor(exact + 1e-12));
        rem[i] = exact - static_cast<double>(quota[i]);
        total += quota[i];
    }
    for (; total < n; ++total) {
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (rem[i] > rem[best]) best = i;
        ++quota[best];
        rem[best] = -1.0;
    }
    std::vector<std::pair<std::uint64_t, std::int64_t>> ranked;
    for (std::int64_t i = 0; i < n; ++i)
        ranked.emplace_back(derive_seed(seed, kStreamSplit, static_cast<std::uint64_t>(i)), i);
    std::sort(ranked.begin(), ranked.end());
    std::vector<int> out(static_cast<std::size_t>(n));
    std::int64_t pos = 0;
    for (int s = 0; s < 3; ++s)
        for (std::int64_t k = 0; k < quota[s]; ++k) out[ranked[pos++].second] = s;
    return out;
}

}  // namespace oracle
