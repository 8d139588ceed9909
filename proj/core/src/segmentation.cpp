#include "vsyn/segmentation.hpp"

#include <algorithm>
#include <stdexcept>

namespace vsyn {

BinaryMask binarize(const LabelMask& labels) {
    BinaryMask out(labels.width, labels.height);
    for (std::size_t i = 0; i < labels.labels.size(); ++i)
        out.bits[i] = labels.labels[i] == PixelLabel::foreground ? 1 : 0;
    return out;
}

namespace {

// Separable square-element morphology. Dilation pads with 0, erosion pads
// with 1, so objects touching the frame edge keep their extent.
template <bool Max>
void run_pass_h(const std::uint8_t* in, std::uint8_t* out, int w, int h, int r) {
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = in + static_cast<std::size_t>(y) * w;
        std::uint8_t* dst = out + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            std::uint8_t v = Max ? 0 : 1;
            const int x0 = std::max(0, x - r), x1 = std::min(w - 1, x + r);
            for (int i = x0; i <= x1; ++i)
                v = Max ? std::max(v, row[i]) : std::min(v, row[i]);
            dst[x] = v;
        }
    }
}

template <bool Max>
void run_pass_v(const std::uint8_t* in, std::uint8_t* out, int w, int h, int r) {
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - r), y1 = std::min(h - 1, y + r);
        std::uint8_t* dst = out + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            std::uint8_t v = Max ? 0 : 1;
            for (int i = y0; i <= y1; ++i) {
                const std::uint8_t s = in[static_cast<std::size_t>(i) * w + x];
                v = Max ? std::max(v, s) : std::min(v, s);
            }
            dst[x] = v;
        }
    }
}

template <bool Max>
BinaryMask run_morph(const BinaryMask& mask, int r) {
    BinaryMask tmp(mask.width, mask.height);
    BinaryMask out(mask.width, mask.height);
    run_pass_h<Max>(mask.bits.data(), tmp.bits.data(), mask.width, mask.height, r);
    run_pass_v<Max>(tmp.bits.data(), out.bits.data(), mask.width, mask.height, r);
    return out;
}

}  // namespace

BinaryMask dilate(const BinaryMask& mask, int radius) { return run_morph<true>(mask, radius); }
BinaryMask erode(const BinaryMask& mask, int radius) { return run_morph<false>(mask, radius); }

BinaryMask morph_close(const BinaryMask& mask, int kernel_radius, int iterations) {
    if (kernel_radius < 1) throw std::invalid_argument("segmentation: kernel_radius must be >= 1");
    BinaryMask m = mask;
    for (int i = 0; i < iterations; ++i) m = erode(dilate(m, kernel_radius), kernel_radius);
    return dilate(erode(m, kernel_radius), kernel_radius);
}

namespace {

struct ComponentInfo {
    Vec2i start;  // topmost-leftmost pixel
    int area = 0;
};

// 8-connected component labeling; labels assigned in raster-scan order of
// each component's topmost-leftmost pixel.
std::vector<ComponentInfo> label_components(const BinaryMask& mask, std::vector<int>& labels) {
    const int w = mask.width, h = mask.height;
    labels.assign(static_cast<std::size_t>(w) * h, -1);
    std::vector<ComponentInfo> comps;
    std::vector<Vec2i> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (!mask.bits[idx] || labels[idx] >= 0) continue;
            const int id = static_cast<int>(comps.size());
            ComponentInfo info;
            info.start = {x, y};
            stack.push_back({x, y});
            labels[idx] = id;
            while (!stack.empty()) {
                const Vec2i p = stack.back();
                stack.pop_back();
                ++info.area;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (!dx && !dy) continue;
                        const int nx = p.x + dx, ny = p.y + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                        if (mask.bits[ni] && labels[ni] < 0) {
                            labels[ni] = id;
                            stack.push_back({nx, ny});
                        }
                    }
                }
            }
            comps.push_back(info);
        }
    }
    return comps;
}

// Moore-neighbor border following with Jacob's stopping criterion.
// Neighbor ring, clockwise in image coordinates starting at west.
constexpr int kOffX[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr int kOffY[8] = {0, -1, -1, -1, 0, 1, 1, 1};

int dir_index(int dx, int dy) {
    for (int d = 0; d < 8; ++d)
        if (kOffX[d] == dx && kOffY[d] == dy) return d;
    return -1;
}

Contour trace_boundary(const std::vector<int>& labels, int w, int h, int id, Vec2i start) {
    auto is_comp = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < w && y < h &&
               labels[static_cast<std::size_t>(y) * w + x] == id;
    };
    Contour contour{start};
    Vec2i cur = start;
    int back = 0;  // west of the topmost-leftmost pixel is always outside
    int first_move = -1;
    const std::size_t step_cap = 4 * static_cast<std::size_t>(w) * h + 8;
    for (std::size_t steps = 0; steps < step_cap; ++steps) {
        int found = -1;
        for (int k = 1; k <= 8; ++k) {
            const int d = (back + k) % 8;
            if (is_comp(cur.x + kOffX[d], cur.y + kOffY[d])) {
                found = d;
                break;
            }
        }
        if (found < 0) break;  // isolated pixel
        if (cur == start) {
            if (first_move < 0)
                first_move = found;
            else if (found == first_move)
                break;  // re-entering the start the same way: done
        }
        const int prev = (found + 7) % 8;  // last cell examined before found; outside
        const Vec2i outside{cur.x + kOffX[prev], cur.y + kOffY[prev]};
        cur = {cur.x + kOffX[found], cur.y + kOffY[found]};
        contour.push_back(cur);
        back = dir_index(outside.x - cur.x, outside.y - cur.y);
        if (back < 0) back = (found + 4) % 8;  // unreachable; keep the walk alive
    }
    // the walk appends the start pixel again on closing the loop; drop it
    if (contour.size() > 1 && contour.back() == contour.front()) contour.pop_back();
    return contour;
}

}  // namespace

std::vector<Contour> extract_components(const BinaryMask& mask) {
    std::vector<int> labels;
    const auto comps = label_components(mask, labels);
    std::vector<Contour> contours;
    contours.reserve(comps.size());
    for (std::size_t id = 0; id < comps.size(); ++id)
        contours.push_back(
            trace_boundary(labels, mask.width, mask.height, static_cast<int>(id), comps[id].start));
    return contours;
}

Polygon convex_hull(const Contour& contour) {
    if (contour.empty()) throw std::invalid_argument("segmentation: empty contour");
    std::vector<Vec2i> pts = contour;
    std::sort(pts.begin(), pts.end(), [](Vec2i a, Vec2i b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;

    auto cross = [](Vec2i o, Vec2i a, Vec2i b) {
        return static_cast<std::int64_t>(a.x - o.x) * (b.y - o.y) -
               static_cast<std::int64_t>(a.y - o.y) * (b.x - o.x);
    };

    std::vector<Vec2i> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {  // lower
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, lo = k + 1; i-- > 0;) {  // upper
        while (k >= lo && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 2) return {pts.front(), pts.back()};  // all collinear
    return hull;
}

std::vector<Detection> detect_objects(const Frame& frame, const LabelMask& labels,
                                      const SegmentationParams& params) {
    if (frame.width != labels.width || frame.height != labels.height)
        throw std::invalid_argument("segmentation: frame and label mask dimensions differ");

    const BinaryMask closed =
        morph_close(binarize(labels), params.morph_radius, params.morph_iterations);
    std::vector<int> comp_labels;
    const auto comps = label_components(closed, comp_labels);
    const double min_area =
        params.min_area_fraction * static_cast<double>(frame.width) * frame.height;

    std::vector<Detection> dets;
    for (std::size_t id = 0; id < comps.size(); ++id) {
        if (static_cast<double>(comps[id].area) < min_area) continue;
        const Contour contour = trace_boundary(comp_labels, closed.width, closed.height,
                                               static_cast<int>(id), comps[id].start);
        const Polygon hull = convex_hull(contour);
        int min_x = hull[0].x, max_x = hull[0].x, min_y = hull[0].y, max_y = hull[0].y;
        for (const auto& p : hull) {
            min_x = std::min(min_x, p.x);
            max_x = std::max(max_x, p.x);
            min_y = std::min(min_y, p.y);
            max_y = std::max(max_y, p.y);
        }
        Detection det;
        det.box = {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
        det.area = comps[id].area;
        det.centroid = center(det.box);
        det.mask_crop = BinaryMask(det.box.w, det.box.h);
        det.pixel_crop.resize(static_cast<std::size_t>(det.box.w) * det.box.h * 3);
        for (int y = 0; y < det.box.h; ++y) {
            const int sy = det.box.y + y;
            const std::uint8_t* src = frame.row(sy) + 3 * det.box.x;
            std::copy_n(src, static_cast<std::size_t>(det.box.w) * 3,
                        det.pixel_crop.data() + static_cast<std::size_t>(y) * det.box.w * 3);
            for (int x = 0; x < det.box.w; ++x) {
                const std::size_t li = static_cast<std::size_t>(sy) * closed.width + det.box.x + x;
                if (comp_labels[li] == static_cast<int>(id)) det.mask_crop.set(x, y, 1);
            }
        }
        dets.push_back(std::move(det));
    }
    std::sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
        return a.box.y != b.box.y ? a.box.y < b.box.y : a.box.x < b.box.x;
    });
    return dets;
}

}  // namespace vsyn
