#include "vsyn/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vsyn {

bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon) {
    const std::size_t n = polygon.size();
    if (n < 3) return false;
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = polygon[i], b = polygon[j];
        // edge hit counts as inside
        const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if (cross == 0.0 && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
            std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y))
            return true;
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_at = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x_at) inside = !inside;
        }
    }
    return inside;
}

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("metrics: " + msg);
}

std::vector<double> split_numbers(const std::string& line) {
    std::vector<double> out;
    std::istringstream in(line);
    // commas and tabs both act as separators
    std::string token;
    while (in >> token) {
        std::string clean;
        for (char c : token)
            if (c != ',') clean += c;
        if (clean.empty()) continue;
        try {
            out.push_back(std::stod(clean));
        } catch (...) {
            fail("bad numeric field '" + token + "' in row: " + line);
        }
    }
    return out;
}

}  // namespace

AnnotationSet read_annotations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path.string());
    AnnotationSet set;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::string spaced = line;
        std::replace(spaced.begin(), spaced.end(), ',', ' ');
        const auto v = split_numbers(spaced);
        if (v.size() != 6) fail("annotation rows need 6 fields: " + line);
        const auto frame = static_cast<std::int64_t>(v[0]);
        set.per_frame[frame].emplace_back(
            static_cast<int>(v[1]), Box{static_cast<int>(v[2]), static_cast<int>(v[3]),
                                        static_cast<int>(v[4]), static_cast<int>(v[5])});
    }
    return set;
}

void write_annotations(std::ostream& out, const AnnotationSet& set) {
    for (const auto& [frame, rows] : set.per_frame)
        for (const auto& [id, box] : rows)
            out << frame << '\t' << id << '\t' << box.x << '\t' << box.y << '\t' << box.w << '\t'
                << box.h << '\n';
}

std::vector<Vec2> read_roi(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path.string());
    std::vector<Vec2> poly;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::string spaced = line;
        std::replace(spaced.begin(), spaced.end(), ',', ' ');
        const auto v = split_numbers(spaced);
        if (v.size() != 2) fail("ROI rows need 2 fields: " + line);
        poly.push_back({v[0], v[1]});
    }
    if (poly.size() < 3) fail("ROI polygon needs at least 3 vertices");
    return poly;
}

std::pair<std::int64_t, std::int64_t> match_frame(std::span<const std::pair<int, Box>> gt,
                                                  std::span<const std::pair<int, Box>> pred,
                                                  double iou_threshold,
                                                  const std::vector<Vec2>* roi) {
    if (iou_threshold <= 0.0 || iou_threshold >= 1.0)
        fail("iou threshold must be in (0,1)");

    std::vector<Box> preds;
    for (const auto& [id, box] : pred) {
        if (roi && !point_in_polygon(center(box), *roi)) continue;
        preds.push_back(box);
    }

    struct Cand {
        double iou;
        int g;
        int p;
    };
    std::vector<Cand> cands;
    for (int g = 0; g < static_cast<int>(gt.size()); ++g)
        for (int p = 0; p < static_cast<int>(preds.size()); ++p) {
            const double v = iou(gt[g].second, preds[p]);
            if (v >= iou_threshold) cands.push_back({v, g, p});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.g != b.g) return a.g < b.g;
        return a.p < b.p;
    });

    std::vector<char> gt_used(gt.size(), 0), pred_used(preds.size(), 0);
    std::int64_t tp = 0;
    for (const auto& c : cands) {
        if (gt_used[c.g] || pred_used[c.p]) continue;  // duplicates become FP
        gt_used[c.g] = pred_used[c.p] = 1;
        ++tp;
    }
    return {tp, static_cast<std::int64_t>(preds.size()) - tp};
}

EvalCounts evaluate_frames(const AnnotationSet& gt, const AnnotationSet& pred,
                           std::int64_t total_frames, double iou_threshold) {
    if (total_frames < 0) fail("negative frame count");
    if (gt.max_frame() >= total_frames || pred.max_frame() >= total_frames)
        fail("mismatched video lengths: rows beyond frame " + std::to_string(total_frames - 1));
    EvalCounts counts;
    counts.per_frame.resize(static_cast<std::size_t>(total_frames));
    const std::vector<Vec2>* roi = gt.roi ? &*gt.roi : nullptr;
    static const std::vector<std::pair<int, Box>> empty;
    for (std::int64_t n = 0; n < total_frames; ++n) {
        const auto git = gt.per_frame.find(n);
        const auto pit = pred.per_frame.find(n);
        const auto& g = git != gt.per_frame.end() ? git->second : empty;
        const auto& p = pit != pred.per_frame.end() ? pit->second : empty;
        const auto [tp, fp] = match_frame(g, p, iou_threshold, roi);
        counts.per_frame[n] = {tp, fp, static_cast<std::int64_t>(g.size())};
    }
    return counts;
}

std::pair<double, double> precision_recall(const EvalCounts& counts, std::int64_t i) {
    const auto n_frames = static_cast<std::int64_t>(counts.per_frame.size());
    if (i < 1 || i > n_frames) fail("frame index out of range");
    std::int64_t tp = 0, tp_fp = 0, np_total = 0;
    for (std::int64_t n = 0; n < n_frames; ++n) {
        if (n < i) {
            tp += counts.per_frame[n].tp;
            tp_fp += counts.per_frame[n].tp + counts.per_frame[n].fp;
        }
        np_total += counts.per_frame[n].np;  // recall divides by the full video
    }
    const double precision = tp_fp > 0 ? static_cast<double>(tp) / tp_fp : 1.0;
    const double recall = np_total > 0 ? static_cast<double>(tp) / np_total : 1.0;
    return {precision, recall};
}

double average_precision(double precision, double recall) { return precision * recall; }

double frame_reduction_rate(std::int64_t tsv, std::int64_t tov) {
    if (tov <= 0) fail("frame_reduction_rate needs tov > 0");
    return static_cast<double>(tsv) / static_cast<double>(tov);
}

double throughput_fps(std::int64_t tov, double elapsed_seconds) {
    if (elapsed_seconds <= 0) fail("throughput_fps needs elapsed > 0");
    return static_cast<double>(tov) / elapsed_seconds;
}

std::vector<std::pair<double, double>> pr_curve(const EvalCounts& counts) {
    std::vector<std::pair<double, double>> curve;
    curve.reserve(counts.per_frame.size());
    std::int64_t np_total = 0;
    for (const auto& c : counts.per_frame) np_total += c.np;
    std::int64_t tp = 0, tp_fp = 0;
    for (const auto& c : counts.per_frame) {
        tp += c.tp;
        tp_fp += c.tp + c.fp;
        const double precision = tp_fp > 0 ? static_cast<double>(tp) / tp_fp : 1.0;
        const double recall = np_total > 0 ? static_cast<double>(tp) / np_total : 1.0;
        curve.emplace_back(recall, precision);
    }
    return curve;
}

void write_pr_csv(std::ostream& out, const std::vector<std::pair<double, double>>& curve) {
    out << "recall,precision\n";
    for (const auto& [r, p] : curve) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", r, p);
        out << buf;
    }
}

}  // namespace vsyn
