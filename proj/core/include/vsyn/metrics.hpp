#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "vsyn/geometry.hpp"

namespace vsyn {

/// Per-frame annotated boxes, plus an optional evaluation ROI polygon.
struct AnnotationSet {
    std::map<std::int64_t, std::vector<std::pair<int, Box>>> per_frame;
    std::optional<std::vector<Vec2>> roi;

    std::int64_t max_frame() const {
        return per_frame.empty() ? -1 : per_frame.rbegin()->first;
    }
};

/// Rows are tab-separated: frame_index, object_id, x, y, w, h.
AnnotationSet read_annotations(const std::filesystem::path& path);
void write_annotations(std::ostream& out, const AnnotationSet& set);

/// ROI polygon file: one "x y" vertex per row.
std::vector<Vec2> read_roi(const std::filesystem::path& path);

struct FrameCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t np = 0;  // annotated detections this frame
};

struct EvalCounts {
    std::vector<FrameCounts> per_frame;  // index = frame
};

/// Greedy one-to-one matching by descending IoU; pairs at or above the
/// threshold are true positives, remaining predictions false positives.
/// Predictions whose box center lies outside the ROI are ignored.
std::pair<std::int64_t, std::int64_t> match_frame(
    std::span<const std::pair<int, Box>> gt, std::span<const std::pair<int, Box>> pred,
    double iou_threshold, const std::vector<Vec2>* roi = nullptr);

/// Counts for frames 0..total_frames-1. Frames beyond that range in either
/// set are an error (mismatched video lengths).
EvalCounts evaluate_frames(const AnnotationSet& gt, const AnnotationSet& pred,
                           std::int64_t total_frames, double iou_threshold);

/// Cumulative precision/recall through 1-based frame i. Recall divides by
/// the whole-video annotation count. Empty precision denominators read 1.
std::pair<double, double> precision_recall(const EvalCounts& counts, std::int64_t i);

/// The product of final precision and recall.
double average_precision(double precision, double recall);

double frame_reduction_rate(std::int64_t tsv, std::int64_t tov);
double throughput_fps(std::int64_t tov, double elapsed_seconds);

/// (recall, precision) sampled at every frame 1..N.
std::vector<std::pair<double, double>> pr_curve(const EvalCounts& counts);
void write_pr_csv(std::ostream& out, const std::vector<std::pair<double, double>>& curve);

}  // namespace vsyn
