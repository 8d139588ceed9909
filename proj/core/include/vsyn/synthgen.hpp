#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "vsyn/frame_io.hpp"
#include "vsyn/metrics.hpp"

namespace vsyn {

struct SceneObject {
    int id = 0;
    std::array<std::uint8_t, 3> color{200, 200, 200};
    int w = 20;
    int h = 20;
    std::int64_t entry_frame = 0;
    std::vector<std::pair<std::int64_t, Vec2>> waypoints;  // (frame, center)
};

struct SceneSpec {
    int width = 320;
    int height = 240;
    double fps = 18.0;
    std::int64_t duration_frames = 0;
    std::array<std::uint8_t, 3> background{24, 28, 32};
    std::optional<std::array<std::uint8_t, 3>> gradient;  // bottom color when set
    double noise_sigma = 0.0;
    std::uint64_t seed = 1;
    std::vector<SceneObject> objects;
};

/// Key-value scene description; schema documented in the README.
SceneSpec parse_scene_spec(std::istream& in);
SceneSpec load_scene_spec(const std::filesystem::path& path);

/// Throws on out-of-order waypoints, out-of-bounds boxes, duplicate ids.
void validate_scene(const SceneSpec& spec);

/// Box of an object at a frame, or nullopt when not on screen. Centers are
/// interpolated linearly between waypoints and rounded to whole pixels.
std::optional<Box> object_box_at(const SceneSpec& spec, const SceneObject& object,
                                 std::int64_t frame_index);

/// Renders one frame: background, solid rectangles in list order, then
/// seeded per-pixel Gaussian noise. Bit-identical for identical spec+seed.
Frame render_frame(const SceneSpec& spec, std::int64_t frame_index);

/// Exact per-frame boxes of every visible object.
AnnotationSet scene_annotations(const SceneSpec& spec);

struct TubeExtent {
    int id = 0;
    std::int64_t first_frame = 0;
    std::int64_t last_frame = 0;
};
std::vector<TubeExtent> scene_tube_manifest(const SceneSpec& spec);
void write_tube_manifest(std::ostream& out, const std::vector<TubeExtent>& manifest);

/// FrameSource rendering the scene on demand.
class SyntheticSource final : public FrameSource {
public:
    explicit SyntheticSource(SceneSpec spec);
    std::optional<Frame> next() override;
    const VideoMeta& meta() const override { return meta_; }

private:
    SceneSpec spec_;
    VideoMeta meta_;
    std::int64_t next_index_ = 0;
};

/// generate subcommand: frames + annotations.tsv + tubes.tsv into out_dir.
void render_scene_to_dir(const SceneSpec& spec, const std::filesystem::path& out_dir);

}  // namespace vsyn
