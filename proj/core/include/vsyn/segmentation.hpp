#pragma once

#include <cstdint>
#include <vector>

#include "vsyn/background_model.hpp"
#include "vsyn/frame.hpp"
#include "vsyn/geometry.hpp"

namespace vsyn {

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 0 or 1

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

    std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
    void set(int x, int y, std::uint8_t v) { bits[static_cast<std::size_t>(y) * width + x] = v; }
};

using Contour = std::vector<Vec2i>;  // ordered boundary pixels
using Polygon = std::vector<Vec2i>;

/// One segmented object at one frame.
struct Detection {
    Box box;
    BinaryMask mask_crop;                  // component pixels within box
    std::vector<std::uint8_t> pixel_crop;  // RGB, box.w * box.h * 3
    int area = 0;                          // foreground pixel count of the component
    Vec2 centroid;                         // box center
};

struct SegmentationParams {
    int morph_radius = 1;
    int morph_iterations = 2;
    double min_area_fraction = 0.0002;  // of frame area
};

/// foreground -> 1; background and shadow -> 0.
BinaryMask binarize(const LabelMask& labels);

/// `iterations` closing passes (dilate, erode) with a (2r+1)^2 square element,
/// then one opening pass to drop speckle.
BinaryMask morph_close(const BinaryMask& mask, int kernel_radius, int iterations);

BinaryMask dilate(const BinaryMask& mask, int radius);
BinaryMask erode(const BinaryMask& mask, int radius);

/// Outer contour per 8-connected component, discovered in raster order.
/// Holes are ignored.
std::vector<Contour> extract_components(const BinaryMask& mask);

/// Monotone-chain hull, counter-clockwise, strict turns (no collinear
/// triples). Collinear input degenerates to a 2-point segment.
Polygon convex_hull(const Contour& contour);

/// Full detection pass: binarize, close, trace, hull, box, crop. Components
/// below min_area are dropped; output sorted by (y, x) of the box origin.
std::vector<Detection> detect_objects(const Frame& frame, const LabelMask& labels,
                                      const SegmentationParams& params = {});

}  // namespace vsyn
