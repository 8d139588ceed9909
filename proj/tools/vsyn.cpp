#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vsyn/metrics.hpp"
#include "vsyn/pipeline.hpp"
#include "vsyn/synthgen.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "vsyn 0.1.0";

struct CommonOptions {
    vsyn::PipelineConfig config;
    double fps_override = 0.0;
    std::string dump_masks, dump_tubes;

    void apply() {
        if (!dump_masks.empty()) config.dump_masks = fs::path(dump_masks);
        if (!dump_tubes.empty()) config.dump_tubes = fs::path(dump_tubes);
        config.progress_every = 500;
        config.progress = [](std::int64_t frames) {
            std::fprintf(stderr, "processed %lld frames\n", static_cast<long long>(frames));
        };
    }
};

void add_detection_flags(CLI::App* cmd, CommonOptions& opts) {
    auto& bg = opts.config.bg;
    cmd->add_option("--bg-history", bg.history, "Background sample window");
    cmd->add_option("--bg-var-threshold", bg.var_threshold, "Squared-distance match multiplier");
    cmd->add_option("--bg-shadow-ratio", bg.shadow_ratio, "Darkness ratio floor for shadows");
    cmd->add_option("--bg-kmax", bg.k_max, "Max mixture components per pixel");
    cmd->add_option("--bg-ratio", bg.background_ratio, "Cumulative-weight background cutoff");
    auto& seg = opts.config.seg;
    cmd->add_option("--morph-radius", seg.morph_radius, "Structuring element radius");
    cmd->add_option("--morph-iters", seg.morph_iterations, "Closing iterations");
    cmd->add_option("--min-area", seg.min_area_fraction, "Minimum component area fraction");
    cmd->add_option("--gate-factor", opts.config.gate_factor, "Association gate multiplier");
    cmd->add_option("--max-misses", opts.config.max_misses, "Coasting frames before termination");
    cmd->add_option("--threads", opts.config.threads, "Worker threads (1 = sequential)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--fps", opts.fps_override, "Frame rate override for directory inputs");
    cmd->add_option("--dump-masks", opts.dump_masks, "Write closed foreground masks (PGM) here");
}

std::unique_ptr<vsyn::FrameSource> open_input(const std::string& input, double fps_override) {
    std::optional<vsyn::VideoMeta> meta;
    if (fps_override > 0) {
        meta = vsyn::VideoMeta{};
        meta->fps = fps_override;
    }
    return vsyn::open_frame_source(input, meta);
}

void remove_partial(const std::vector<fs::path>& outputs) {
    std::error_code ec;
    for (const auto& p : outputs) fs::remove_all(p, ec);
}

int run_guarded(const std::vector<fs::path>& outputs, const std::function<int()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        remove_partial(outputs);
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Real-time collision-free video synopsis engine"};
    app.set_config("--config", "", "Read defaults from a key=value file");
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // ------------------------------------------------------------ synopsize
    auto* syn = app.add_subcommand("synopsize", "Condense a video into a synopsis");
    CommonOptions syn_opts;
    std::string syn_input, syn_output, syn_schedule, syn_report, syn_tracks;
    std::string collision = "box", labels = "on";
    syn->add_option("--input", syn_input, "Source video (PPM directory or .y4m)")->required();
    syn->add_option("--output", syn_output, "Synopsis video (directory or .y4m)");
    syn->add_option("--cluster-size", syn_opts.config.synopsis.cluster_size,
                    "CS: max tubes stitched concurrently")
        ->required()
        ->check(CLI::PositiveNumber);
    syn->add_option("--collision", collision, "Collision test granularity")
        ->check(CLI::IsMember({"box", "pixel"}));
    syn->add_option("--labels", labels, "Timestamp overlays")->check(CLI::IsMember({"on", "off"}));
    syn->add_option("--schedule", syn_schedule, "Schedule CSV path");
    syn->add_option("--report", syn_report, "Summary report path");
    syn->add_option("--dump-tracks", syn_tracks, "Track log path");
    syn->add_option("--dump-tubes", syn_opts.dump_tubes, "Per-tube crop archive directory");
    syn->add_option("--snapshot-interval", syn_opts.config.snapshot_interval,
                    "Frames between background snapshots")
        ->check(CLI::PositiveNumber);
    add_detection_flags(syn, syn_opts);

    // ---------------------------------------------------------------- track
    auto* trk = app.add_subcommand("track", "Detect and track, write the track log");
    CommonOptions trk_opts;
    std::string trk_input, trk_output;
    trk->add_option("--input", trk_input, "Source video (PPM directory or .y4m)")->required();
    trk->add_option("--output", trk_output, "Track log path")->required();
    add_detection_flags(trk, trk_opts);

    // ------------------------------------------------------------- evaluate
    auto* eval = app.add_subcommand("evaluate", "Score a track log against annotations");
    std::string eval_gt, eval_pred, eval_roi, eval_curve;
    double eval_iou = 0.5;
    std::int64_t eval_frames = 0;
    eval->add_option("--gt", eval_gt, "Ground-truth annotation file")->required();
    eval->add_option("--pred", eval_pred, "Predicted track log")->required();
    eval->add_option("--roi", eval_roi, "ROI polygon file");
    eval->add_option("--iou", eval_iou, "IoU threshold for a true positive");
    eval->add_option("--frames", eval_frames, "Total video frames (default: derived)");
    eval->add_option("--pr-curve", eval_curve, "Write the precision-recall curve CSV here");

    // ------------------------------------------------------------- generate
    auto* gen = app.add_subcommand("generate", "Render a synthetic scene");
    std::string gen_spec, gen_out;
    gen->add_option("--spec", gen_spec, "Scene description file")->required();
    gen->add_option("--out", gen_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // exit 0 for --help/--version, 1 for any usage error
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (syn->parsed()) {
        std::vector<fs::path> outputs;
        if (!syn_output.empty()) outputs.emplace_back(syn_output);
        if (!syn_schedule.empty()) outputs.emplace_back(syn_schedule);
        if (!syn_report.empty()) outputs.emplace_back(syn_report);
        return run_guarded(outputs, [&] {
            syn_opts.apply();
            syn_opts.config.synopsis.collision =
                collision == "pixel" ? vsyn::CollisionMode::pixel : vsyn::CollisionMode::box;
            syn_opts.config.synopsis.labels = labels == "on";
            auto source = open_input(syn_input, syn_opts.fps_override);
            std::unique_ptr<vsyn::FrameSink> sink;
            if (!syn_output.empty()) sink = vsyn::open_frame_sink(syn_output, source->meta());
            const auto result = vsyn::run_synopsize(*source, sink.get(), syn_opts.config);
            if (!syn_schedule.empty()) {
                std::ofstream out(syn_schedule, std::ios::trunc);
                vsyn::write_schedule_csv(out, result.schedule);
            }
            if (!syn_report.empty()) {
                std::ofstream out(syn_report, std::ios::trunc);
                out << vsyn::format_report(result);
            }
            if (!syn_tracks.empty()) {
                std::ofstream out(syn_tracks, std::ios::trunc);
                vsyn::write_annotations(out, result.track_log);
            }
            std::cout << vsyn::format_report(result) << vsyn::format_timing(result);
            return 0;
        });
    }

    if (trk->parsed()) {
        return run_guarded({fs::path(trk_output)}, [&] {
            trk_opts.apply();
            auto source = open_input(trk_input, trk_opts.fps_override);
            const auto result = vsyn::run_track(*source, trk_opts.config);
            std::ofstream out(trk_output, std::ios::trunc);
            vsyn::write_annotations(out, result.log);
            std::cout << "FRAMES " << result.frames << "\nTRACKS " << result.confirmed_ids.size()
                      << "\n";
            return 0;
        });
    }

    if (eval->parsed()) {
        return run_guarded({}, [&] {
            auto gt = vsyn::read_annotations(eval_gt);
            const auto pred = vsyn::read_annotations(eval_pred);
            if (!eval_roi.empty()) gt.roi = vsyn::read_roi(eval_roi);
            const std::int64_t total = eval_frames > 0
                                           ? eval_frames
                                           : std::max(gt.max_frame(), pred.max_frame()) + 1;
            if (total < 1) throw std::runtime_error("evaluate: no annotation rows in either file");
            const auto counts = vsyn::evaluate_frames(gt, pred, total, eval_iou);
            const auto [precision, recall] = vsyn::precision_recall(counts, total);
            const double ap = vsyn::average_precision(precision, recall);
            std::printf("PRECISION %.6f\nRECALL %.6f\nAP %.6f\n", precision, recall, ap);
            if (!eval_curve.empty()) {
                std::ofstream out(eval_curve, std::ios::trunc);
                vsyn::write_pr_csv(out, vsyn::pr_curve(counts));
            }
            return 0;
        });
    }

    if (gen->parsed()) {
        return run_guarded({fs::path(gen_out)}, [&] {
            const auto spec = vsyn::load_scene_spec(gen_spec);
            vsyn::render_scene_to_dir(spec, gen_out);
            std::cout << "FRAMES " << spec.duration_frames << "\nOBJECTS " << spec.objects.size()
                      << "\n";
            return 0;
        });
    }
    return 1;
}
