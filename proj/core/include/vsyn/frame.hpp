#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace vsyn {

struct VideoMeta {
    double fps = 18.0;
    std::int64_t total_frames = 0;
    int width = 0;
    int height = 0;
};

/// One RGB raster. pixels is row-major, 3 bytes per pixel, size w*h*3.
struct Frame {
    int width = 0;
    int height = 0;
    std::int64_t index = 0;
    std::int64_t timestamp_ms = 0;
    std::vector<std::uint8_t> pixels;

    Frame() = default;
    Frame(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t* row(int y) { return pixels.data() + static_cast<std::size_t>(y) * width * 3; }
    const std::uint8_t* row(int y) const { return pixels.data() + static_cast<std::size_t>(y) * width * 3; }
    std::uint8_t* at(int x, int y) { return row(y) + 3 * x; }
    const std::uint8_t* at(int x, int y) const { return row(y) + 3 * x; }

    void fill(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        for (std::size_t i = 0; i + 2 < pixels.size(); i += 3) {
            pixels[i] = r;
            pixels[i + 1] = g;
            pixels[i + 2] = b;
        }
    }
};

inline std::int64_t frame_timestamp_ms(std::int64_t index, double fps) {
    return std::llround(index * 1000.0 / fps);
}

}  // namespace vsyn
