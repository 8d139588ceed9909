#include "vsyn/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <thread>

namespace vsyn {

namespace {

namespace fs = std::filesystem;

void dump_closed_mask(const fs::path& dir, std::int64_t index, const Frame& frame,
                      const LabelMask& labels, const SegmentationParams& seg) {
    fs::create_directories(dir);
    const BinaryMask closed = morph_close(binarize(labels), seg.morph_radius, seg.morph_iterations);
    std::vector<std::uint8_t> gray(closed.bits.size());
    for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = closed.bits[i] ? 255 : 0;
    char name[32];
    std::snprintf(name, sizeof name, "mask_%06lld.pgm", static_cast<long long>(index));
    write_pgm(dir / name, frame.width, frame.height, gray.data());
}

void dump_tube(const fs::path& dir, const Tube& tube) {
    char sub[32];
    std::snprintf(sub, sizeof sub, "tube_%04d", tube.id);
    const fs::path tdir = dir / sub;
    fs::create_directories(tdir);
    std::ofstream manifest(tdir / "manifest.tsv");
    for (std::size_t i = 0; i < tube.frames.size(); ++i) {
        const ObjectFrame& of = tube.frames[i];
        manifest << tube.id << '\t' << of.source_frame << '\t' << of.box.x << '\t' << of.box.y
                 << '\t' << of.box.w << '\t' << of.box.h << '\n';
        Frame crop(of.box.w, of.box.h);
        crop.pixels = of.pixel_crop;
        char name[32];
        std::snprintf(name, sizeof name, "of_%04zu.ppm", i);
        write_ppm(tdir / name, crop);
        std::vector<std::uint8_t> gray(of.mask_crop.bits.size());
        for (std::size_t b = 0; b < gray.size(); ++b) gray[b] = of.mask_crop.bits[b] ? 255 : 0;
        std::snprintf(name, sizeof name, "of_%04zu.pgm", i);
        write_pgm(tdir / name, of.box.w, of.box.h, gray.data());
    }
}

void append_track_rows(AnnotationSet& log, const Track& track) {
    for (const auto& [frame, det] : track.history)
        log.per_frame[frame].emplace_back(track.id, det.box);
}

void sort_log_rows(AnnotationSet& log) {
    for (auto& [frame, rows] : log.per_frame)
        std::sort(rows.begin(), rows.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
}

TrackerParams tracker_params_for(const PipelineConfig& config, double fps) {
    TrackerParams tp;
    tp.confirm_frames = std::max(1, static_cast<int>(std::lround(fps)));
    tp.max_misses = config.max_misses;
    tp.gate_factor = config.gate_factor;
    return tp;
}

}  // namespace

SynopsizeResult run_synopsize(FrameSource& source, FrameSink* sink,
                              const PipelineConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const VideoMeta& meta = source.meta();

    BackgroundModel model(config.bg);
    Tracker tracker(tracker_params_for(config, meta.fps));
    SnapshotRegistry snapshots;
    TubeBuffer gtb(config.threads > 1 ? 256 : std::numeric_limits<std::size_t>::max());
    SynopsisScheduler scheduler(config.synopsis, meta.fps, sink);

    SynopsizeResult result;
    result.cs = config.synopsis.cluster_size;

    std::thread consumer;
    std::exception_ptr consumer_error;
    if (config.threads > 1) {
        consumer = std::thread([&] {
            try {
                scheduler.run(gtb);
            } catch (...) {
                consumer_error = std::current_exception();
                gtb.close();  // unblock the producer
            }
        });
    }

    auto handle_terminated = [&](std::vector<Track>&& terminated) {
        for (Track& tr : terminated) {
            if (tr.id == 0) continue;  // never confirmed: noise
            append_track_rows(result.track_log, tr);
            Tube tube = build_tube(std::move(tr), meta.fps);
            tube.background = snapshots.nearest(tube.start_frame);
            result.tubes.push_back(
                {tube.id, tube.start_frame, static_cast<std::int64_t>(tube.frames.size())});
            if (config.dump_tubes) dump_tube(*config.dump_tubes, tube);
            gtb.admit(std::move(tube));
        }
    };

    std::int64_t frames = 0;
    try {
        while (auto frame = source.next()) {
            LabelMask labels = model.update_and_classify(*frame, config.threads);
            if (config.dump_masks)
                dump_closed_mask(*config.dump_masks, frame->index, *frame, labels, config.seg);
            auto detections = detect_objects(*frame, labels, config.seg);
            auto events = tracker.step(detections, frame->index);
            if (frame->index % config.snapshot_interval == 0)
                snapshots.record(frame->index, model.background_image());
            handle_terminated(std::move(events.terminated));
            gtb.advance_watermark(tracker.min_live_first_frame(frame->index + 1));
            if (config.threads <= 1) scheduler.pump(gtb);
            ++frames;
            if (config.progress && config.progress_every > 0 && frames % config.progress_every == 0)
                config.progress(frames);
        }
        handle_terminated(std::move(tracker.flush().terminated));
        gtb.close();
    } catch (...) {
        gtb.close();
        if (consumer.joinable()) consumer.join();
        if (consumer_error) std::rethrow_exception(consumer_error);
        throw;
    }

    if (config.threads > 1) {
        consumer.join();
        if (consumer_error) std::rethrow_exception(consumer_error);
    } else {
        scheduler.pump(gtb);
    }
    if (sink) sink->close();

    result.schedule = scheduler.take_schedule();
    result.tov = frames;
    result.tsv = result.schedule.total_synopsis_frames;
    result.frr = frames > 0 ? static_cast<double>(result.tsv) / static_cast<double>(frames) : 0.0;
    result.total_tubes = static_cast<std::int64_t>(result.tubes.size());
    result.peak_tubes = scheduler.peak_cluster();
    std::sort(result.tubes.begin(), result.tubes.end(), [](const TubeSummary& a, const TubeSummary& b) {
        return a.start_frame != b.start_frame ? a.start_frame < b.start_frame : a.id < b.id;
    });
    sort_log_rows(result.track_log);

    const auto t1 = std::chrono::steady_clock::now();
    result.elapsed_s = std::chrono::duration<double>(t1 - t0).count();
    result.fps = result.elapsed_s > 0 && frames > 0 ? frames / result.elapsed_s : 0.0;
    return result;
}

TrackResult run_track(FrameSource& source, const PipelineConfig& config) {
    const VideoMeta& meta = source.meta();
    BackgroundModel model(config.bg);
    Tracker tracker(tracker_params_for(config, meta.fps));

    TrackResult result;
    auto collect = [&](std::vector<Track>&& terminated) {
        for (const Track& tr : terminated) {
            if (tr.id == 0) continue;
            result.confirmed_ids.push_back(tr.id);
            append_track_rows(result.log, tr);
        }
    };

    while (auto frame = source.next()) {
        LabelMask labels = model.update_and_classify(*frame, config.threads);
        if (config.dump_masks)
            dump_closed_mask(*config.dump_masks, frame->index, *frame, labels, config.seg);
        auto detections = detect_objects(*frame, labels, config.seg);
        auto events = tracker.step(detections, frame->index);
        collect(std::move(events.terminated));
        ++result.frames;
        if (config.progress && config.progress_every > 0 &&
            result.frames % config.progress_every == 0)
            config.progress(result.frames);
    }
    collect(std::move(tracker.flush().terminated));
    std::sort(result.confirmed_ids.begin(), result.confirmed_ids.end());
    sort_log_rows(result.log);
    return result;
}

std::string format_report(const SynopsizeResult& result) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "TOV %lld\nTSV %lld\nFRR %.6f\nCS %d\nTUBES %lld\nPEAK_TUBES %d\n",
                  static_cast<long long>(result.tov), static_cast<long long>(result.tsv),
                  result.frr, result.cs, static_cast<long long>(result.total_tubes),
                  result.peak_tubes);
    return buf;
}

std::string format_timing(const SynopsizeResult& result) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "ELAPSED_S %.3f\nFPS %.1f\n", result.elapsed_s, result.fps);
    return buf;
}

}  // namespace vsyn
