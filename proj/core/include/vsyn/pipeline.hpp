#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vsyn/background_model.hpp"
#include "vsyn/frame_io.hpp"
#include "vsyn/metrics.hpp"
#include "vsyn/segmentation.hpp"
#include "vsyn/synopsis.hpp"
#include "vsyn/tracker.hpp"
#include "vsyn/tube.hpp"

namespace vsyn {

struct PipelineConfig {
    ModelParams bg;
    SegmentationParams seg;
    int max_misses = 5;
    double gate_factor = 1.0;
    SynopsisOptions synopsis;
    int threads = 1;
    std::int64_t snapshot_interval = 300;
    std::optional<std::filesystem::path> dump_masks;
    std::optional<std::filesystem::path> dump_tubes;
    // progress callback, called every `progress_every` frames when set
    std::int64_t progress_every = 0;
    void (*progress)(std::int64_t frames_done) = nullptr;
};

struct TubeSummary {
    int id = 0;
    std::int64_t start_frame = 0;
    std::int64_t length = 0;  // object frames
};

struct SynopsizeResult {
    std::int64_t tov = 0;
    std::int64_t tsv = 0;
    double frr = 0.0;
    int cs = 1;
    std::int64_t total_tubes = 0;
    int peak_tubes = 0;  // peak concurrently stitched tubes (<= CS)
    double elapsed_s = 0.0;
    double fps = 0.0;
    Schedule schedule;
    std::vector<TubeSummary> tubes;
    AnnotationSet track_log;
};

/// Detection -> tracking -> tube building -> scheduling -> compositing.
/// threads == 1 runs the stages cooperatively; more threads move scheduling
/// and compositing onto a consumer thread and split model rows. Output is
/// byte-identical either way.
SynopsizeResult run_synopsize(FrameSource& source, FrameSink* sink,
                              const PipelineConfig& config);

struct TrackResult {
    std::int64_t frames = 0;
    std::vector<int> confirmed_ids;
    AnnotationSet log;  // full history of every confirmed track
};

/// Detection and tracking only.
TrackResult run_track(FrameSource& source, const PipelineConfig& config);

/// Deterministic summary: TOV, TSV, FRR, CS, TUBES, PEAK_TUBES.
std::string format_report(const SynopsizeResult& result);
/// Wall-clock lines (ELAPSED_S, FPS); kept out of the report file so that
/// identical runs stay byte-identical.
std::string format_timing(const SynopsizeResult& result);

}  // namespace vsyn
