#include "vsyn/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace vsyn {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("synthgen: " + msg);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Counter-based Gaussian: independent of evaluation order, so parallel
// rendering stays bit-identical.
double gaussian_at(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t h1 = splitmix64(seed ^ splitmix64(counter));
    const std::uint64_t h2 = splitmix64(h1);
    const double u1 = ((h1 >> 11) + 0.5) * 0x1.0p-53;  // (0,1)
    const double u2 = ((h2 >> 11) + 0.5) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

SceneSpec parse_scene_spec(std::istream& in) {
    SceneSpec spec;
    SceneObject* current = nullptr;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream row(line);
        std::string key;
        if (!(row >> key)) continue;
        auto need = [&](auto&... vals) {
            if (!((row >> vals) && ...))
                fail("line " + std::to_string(line_no) + ": bad arguments for '" + key + "'");
        };
        if (key == "width") need(spec.width);
        else if (key == "height") need(spec.height);
        else if (key == "fps") need(spec.fps);
        else if (key == "frames") need(spec.duration_frames);
        else if (key == "noise") need(spec.noise_sigma);
        else if (key == "seed") need(spec.seed);
        else if (key == "background") {
            int r, g, b;
            need(r, g, b);
            spec.background = {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                               static_cast<std::uint8_t>(b)};
        } else if (key == "gradient") {
            int r, g, b;
            need(r, g, b);
            spec.gradient = {{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                              static_cast<std::uint8_t>(b)}};
        } else if (key == "object") {
            SceneObject obj;
            need(obj.id);
            spec.objects.push_back(obj);
            current = &spec.objects.back();
        } else if (key == "color") {
            if (!current) fail("line " + std::to_string(line_no) + ": 'color' outside object");
            int r, g, b;
            need(r, g, b);
            current->color = {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                              static_cast<std::uint8_t>(b)};
        } else if (key == "size") {
            if (!current) fail("line " + std::to_string(line_no) + ": 'size' outside object");
            need(current->w, current->h);
        } else if (key == "waypoint") {
            if (!current) fail("line " + std::to_string(line_no) + ": 'waypoint' outside object");
            std::int64_t frame;
            double cx, cy;
            need(frame, cx, cy);
            if (current->waypoints.empty()) current->entry_frame = frame;
            current->waypoints.emplace_back(frame, Vec2{cx, cy});
        } else {
            fail("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    validate_scene(spec);
    return spec;
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path.string());
    return parse_scene_spec(in);
}

void validate_scene(const SceneSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0) fail("frame dimensions must be positive");
    if (spec.fps <= 0) fail("fps must be positive");
    if (spec.duration_frames < 0) fail("duration must be non-negative");
    if (spec.noise_sigma < 0) fail("noise sigma must be non-negative");
    std::vector<int> ids;
    for (const auto& obj : spec.objects) {
        if (obj.w <= 0 || obj.h <= 0) fail("object sizes must be positive");
        if (obj.waypoints.empty()) fail("object " + std::to_string(obj.id) + " has no waypoints");
        if (obj.entry_frame != obj.waypoints.front().first)
            fail("object " + std::to_string(obj.id) + ": entry frame must match first waypoint");
        std::int64_t prev = -1;
        for (const auto& [frame, c] : obj.waypoints) {
            if (frame <= prev)
                fail("object " + std::to_string(obj.id) + ": waypoint frames must increase");
            prev = frame;
            if (frame < 0 || frame >= spec.duration_frames)
                fail("object " + std::to_string(obj.id) + ": waypoint outside video duration");
            const Box b{static_cast<int>(std::lround(c.x - obj.w / 2.0)),
                        static_cast<int>(std::lround(c.y - obj.h / 2.0)), obj.w, obj.h};
            if (b.x < 0 || b.y < 0 || b.x + b.w > spec.width || b.y + b.h > spec.height)
                fail("object " + std::to_string(obj.id) + ": waypoint box out of bounds");
        }
        ids.push_back(obj.id);
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) fail("duplicate object ids");
}

std::optional<Box> object_box_at(const SceneSpec&, const SceneObject& object,
                                 std::int64_t frame_index) {
    if (object.waypoints.empty()) return std::nullopt;
    if (frame_index < object.entry_frame || frame_index > object.waypoints.back().first)
        return std::nullopt;
    Vec2 c = object.waypoints.back().second;
    for (std::size_t i = 0; i + 1 < object.waypoints.size(); ++i) {
        const auto& [f0, c0] = object.waypoints[i];
        const auto& [f1, c1] = object.waypoints[i + 1];
        if (frame_index >= f0 && frame_index <= f1) {
            const double t = f1 == f0 ? 0.0
                                      : static_cast<double>(frame_index - f0) /
                                            static_cast<double>(f1 - f0);
            c = {c0.x + t * (c1.x - c0.x), c0.y + t * (c1.y - c0.y)};
            break;
        }
    }
    return Box{static_cast<int>(std::lround(c.x - object.w / 2.0)),
               static_cast<int>(std::lround(c.y - object.h / 2.0)), object.w, object.h};
}

Frame render_frame(const SceneSpec& spec, std::int64_t frame_index) {
    Frame f(spec.width, spec.height);
    f.index = frame_index;
    f.timestamp_ms = frame_timestamp_ms(frame_index, spec.fps);

    if (spec.gradient) {
        for (int y = 0; y < spec.height; ++y) {
            const double t = spec.height > 1 ? static_cast<double>(y) / (spec.height - 1) : 0.0;
            std::uint8_t rgb[3];
            for (int c = 0; c < 3; ++c)
                rgb[c] = static_cast<std::uint8_t>(
                    std::lround(spec.background[c] + t * ((*spec.gradient)[c] - spec.background[c])));
            std::uint8_t* row = f.row(y);
            for (int x = 0; x < spec.width; ++x) {
                row[3 * x] = rgb[0];
                row[3 * x + 1] = rgb[1];
                row[3 * x + 2] = rgb[2];
            }
        }
    } else {
        f.fill(spec.background[0], spec.background[1], spec.background[2]);
    }

    for (const auto& obj : spec.objects) {
        const auto box = object_box_at(spec, obj, frame_index);
        if (!box) continue;
        for (int y = box->y; y < box->y + box->h; ++y) {
            std::uint8_t* row = f.row(y);
            for (int x = box->x; x < box->x + box->w; ++x) {
                row[3 * x] = obj.color[0];
                row[3 * x + 1] = obj.color[1];
                row[3 * x + 2] = obj.color[2];
            }
        }
    }

    if (spec.noise_sigma > 0) {
        const std::uint64_t base =
            static_cast<std::uint64_t>(frame_index) * 0x100000001B3ull;
        for (std::size_t i = 0; i < f.pixels.size(); ++i) {
            const double noise = spec.noise_sigma * gaussian_at(spec.seed, base + i);
            f.pixels[i] = static_cast<std::uint8_t>(
                std::clamp<int>(static_cast<int>(f.pixels[i]) + static_cast<int>(std::lround(noise)),
                                0, 255));
        }
    }
    return f;
}

AnnotationSet scene_annotations(const SceneSpec& spec) {
    AnnotationSet set;
    for (std::int64_t n = 0; n < spec.duration_frames; ++n) {
        for (const auto& obj : spec.objects) {
            const auto box = object_box_at(spec, obj, n);
            if (box) set.per_frame[n].emplace_back(obj.id, *box);
        }
    }
    return set;
}

std::vector<TubeExtent> scene_tube_manifest(const SceneSpec& spec) {
    std::vector<TubeExtent> manifest;
    for (const auto& obj : spec.objects)
        manifest.push_back({obj.id, obj.entry_frame, obj.waypoints.back().first});
    return manifest;
}

void write_tube_manifest(std::ostream& out, const std::vector<TubeExtent>& manifest) {
    for (const auto& t : manifest)
        out << t.id << '\t' << t.first_frame << '\t' << t.last_frame << '\n';
}

SyntheticSource::SyntheticSource(SceneSpec spec) : spec_(std::move(spec)) {
    validate_scene(spec_);
    meta_.fps = spec_.fps;
    meta_.total_frames = spec_.duration_frames;
    meta_.width = spec_.width;
    meta_.height = spec_.height;
}

std::optional<Frame> SyntheticSource::next() {
    if (next_index_ >= spec_.duration_frames) return std::nullopt;
    return render_frame(spec_, next_index_++);
}

void render_scene_to_dir(const SceneSpec& spec, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    VideoMeta meta{spec.fps, spec.duration_frames, spec.width, spec.height};
    auto sink = open_frame_sink(out_dir, meta);
    for (std::int64_t n = 0; n < spec.duration_frames; ++n) sink->write(render_frame(spec, n));
    sink->close();

    std::ofstream ann(out_dir / "annotations.tsv");
    write_annotations(ann, scene_annotations(spec));
    std::ofstream tubes(out_dir / "tubes.tsv");
    write_tube_manifest(tubes, scene_tube_manifest(spec));
}

}  // namespace vsyn
