#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>

#include "vsyn/frame.hpp"

namespace vsyn {

/// Single-consumer stream of frames, indices contiguous from 0.
class FrameSource {
public:
    virtual ~FrameSource() = default;

    /// Next frame in index order; std::nullopt at end of stream (idempotent).
    virtual std::optional<Frame> next() = 0;
    virtual const VideoMeta& meta() const = 0;
};

class FrameSink {
public:
    virtual ~FrameSink() = default;

    virtual void write(const Frame& frame) = 0;
    virtual void close() = 0;
    virtual const VideoMeta& meta() const = 0;
};

/// Opens either a directory of frame_%06d.ppm files or a .y4m stream.
/// Directory sources take fps from meta_override (default 18 when absent).
std::unique_ptr<FrameSource> open_frame_source(const std::filesystem::path& path,
                                               std::optional<VideoMeta> meta_override = {});

/// Directory path -> PPM directory sink; "*.y4m" -> YUV4MPEG2 sink.
std::unique_ptr<FrameSink> open_frame_sink(const std::filesystem::path& path,
                                           const VideoMeta& meta);

// Single-image raster helpers (PPM P6 / PGM P5, maxval 255).
Frame read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const Frame& frame);
void write_pgm(const std::filesystem::path& path, int width, int height,
               const std::uint8_t* gray);

// BT.601 limited-range conversion, 16.16 fixed point. Round trips within
// +/-2 per channel over the whole 24-bit RGB cube.
void rgb_to_ycbcr(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                  std::uint8_t& y, std::uint8_t& cb, std::uint8_t& cr);
void ycbcr_to_rgb(std::uint8_t y, std::uint8_t cb, std::uint8_t cr,
                  std::uint8_t& r, std::uint8_t& g, std::uint8_t& b);

/// 4:2:0 planes; chroma is the rounded mean of each 2x2 block. Dimensions must be even.
void frame_to_yuv420(const Frame& frame, std::vector<std::uint8_t>& y,
                     std::vector<std::uint8_t>& u, std::vector<std::uint8_t>& v);
void yuv420_to_frame(const std::uint8_t* y, const std::uint8_t* u, const std::uint8_t* v,
                     int width, int height, Frame& out);

}  // namespace vsyn
