#include <doctest.h>

#include <algorithm>
#include <set>

#include "support/test_util.hpp"
#include "support/tube_gen.hpp"
#include "vsyn/segmentation.hpp"

using namespace vsyn;
using testsupport::bin_mask;
using testsupport::label_mask;

namespace {

std::set<std::pair<int, int>> to_set(const Contour& c) {
    std::set<std::pair<int, int>> s;
    for (const auto& p : c) s.insert({p.x, p.y});
    return s;
}

// brute-force outer boundary: component pixels 4-adjacent to background that
// is flood-connected to the frame border (holes excluded)
std::set<std::pair<int, int>> brute_outer_boundary(const BinaryMask& mask) {
    const int w = mask.width, h = mask.height;
    std::vector<char> exterior(static_cast<std::size_t>(w) * h, 0);
    std::vector<Vec2i> stack;
    auto push = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= w || y >= h) return;
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (mask.bits[i] || exterior[i]) return;
        exterior[i] = 1;
        stack.push_back({x, y});
    };
    for (int x = 0; x < w; ++x) {
        push(x, 0);
        push(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push(0, y);
        push(w - 1, y);
    }
    while (!stack.empty()) {
        const Vec2i p = stack.back();
        stack.pop_back();
        push(p.x - 1, p.y);
        push(p.x + 1, p.y);
        push(p.x, p.y - 1);
        push(p.x, p.y + 1);
    }
    std::set<std::pair<int, int>> boundary;
    auto outside = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= w || y >= h) return true;
        return exterior[static_cast<std::size_t>(y) * w + x] != 0;
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask.at(x, y) && (outside(x - 1, y) || outside(x + 1, y) || outside(x, y - 1) ||
                                  outside(x, y + 1)))
                boundary.insert({x, y});
    return boundary;
}

}  // namespace

TEST_CASE("binarize maps foreground to 1 and shadow to 0") {
    LabelMask labels = label_mask(4, 3, {});
    labels.labels[0] = PixelLabel::foreground;
    labels.labels[5] = PixelLabel::shadow;
    const BinaryMask bits = binarize(labels);
    CHECK(bits.bits[0] == 1);
    CHECK(bits.bits[5] == 0);
    CHECK(std::count(bits.bits.begin(), bits.bits.end(), 1) == 1);

    // pointwise: checkerboard in, checkerboard out
    LabelMask board = label_mask(6, 6, {});
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x)
            if ((x + y) % 2)
                board.labels[static_cast<std::size_t>(y) * 6 + x] = PixelLabel::foreground;
    const BinaryMask bb = binarize(board);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) REQUIRE(bb.at(x, y) == ((x + y) % 2 ? 1 : 0));
}

TEST_CASE("morph_close fills sub-kernel holes and drops speckle") {
    BinaryMask square(20, 20);
    for (int y = 4; y < 14; ++y)
        for (int x = 4; x < 14; ++x) square.set(x, y, 1);
    square.set(8, 8, 0);  // interior hole
    const BinaryMask closed = morph_close(square, 1, 1);
    CHECK(closed.at(8, 8) == 1);
    for (int y = 4; y < 14; ++y)
        for (int x = 4; x < 14; ++x) REQUIRE(closed.at(x, y) == 1);
    CHECK(closed.at(3, 3) == 0);

    const BinaryMask speck = bin_mask(9, 9, {{4, 4}});
    const BinaryMask after = morph_close(speck, 1, 1);
    CHECK(std::count(after.bits.begin(), after.bits.end(), 1) == 0);

    const BinaryMask empty(7, 5);
    const BinaryMask still = morph_close(empty, 1, 2);
    CHECK(std::count(still.bits.begin(), still.bits.end(), 1) == 0);
}

TEST_CASE("extract_components traces the 3x3 square boundary") {
    BinaryMask mask(8, 8);
    for (int y = 2; y < 5; ++y)
        for (int x = 3; x < 6; ++x) mask.set(x, y, 1);
    const auto contours = extract_components(mask);
    REQUIRE(contours.size() == 1);
    const Contour& c = contours[0];
    CHECK(c.size() == 8);

    // oracle: brute-force boundary by neighborhood scan
    CHECK(to_set(c) == brute_outer_boundary(mask));
    // ordered: consecutive contour points are 8-neighbors, loop closes
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec2i a = c[i], b = c[(i + 1) % c.size()];
        REQUIRE(std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)) == 1);
    }
    // interior pixel excluded
    CHECK(!to_set(c).contains({4, 3}));
}

TEST_CASE("extract_components counts disjoint blobs and handles empty masks") {
    BinaryMask mask(16, 8);
    for (int y = 1; y < 4; ++y)
        for (int x = 1; x < 4; ++x) mask.set(x, y, 1);
    for (int y = 3; y < 7; ++y)
        for (int x = 9; x < 14; ++x) mask.set(x, y, 1);
    CHECK(extract_components(mask).size() == 2);
    CHECK(extract_components(BinaryMask(5, 5)).empty());
    // single pixel is its own contour
    const auto single = extract_components(bin_mask(4, 4, {{2, 2}}));
    REQUIRE(single.size() == 1);
    CHECK(single[0] == Contour{{2, 2}});
}

TEST_CASE("contour tracing properties on random blobs") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        testsupport::Rng rng(seed);
        BinaryMask mask(24, 18);
        const int blobs = rng.range(1, 4);
        for (int b = 0; b < blobs; ++b) {
            const int w = rng.range(1, 8), h = rng.range(1, 6);
            const int x0 = rng.range(0, 24 - w), y0 = rng.range(0, 18 - h);
            for (int y = y0; y < y0 + h; ++y)
                for (int x = x0; x < x0 + w; ++x)
                    if (rng.range(0, 4)) mask.set(x, y, 1);
        }
        const auto contours = extract_components(mask);
        for (const Contour& c : contours) {
            REQUIRE(!c.empty());
            for (std::size_t i = 0; i + 1 < c.size(); ++i)
                REQUIRE(std::max(std::abs(c[i].x - c[i + 1].x), std::abs(c[i].y - c[i + 1].y)) <= 1);
            for (const auto& p : c) REQUIRE(mask.at(p.x, p.y) == 1);
        }
        // contours jointly cover every outer-boundary pixel
        std::set<std::pair<int, int>> traced;
        for (const Contour& c : contours)
            for (const auto& p : c) traced.insert({p.x, p.y});
        for (const auto& p : brute_outer_boundary(mask)) REQUIRE(traced.contains(p));
    }
}

TEST_CASE("convex_hull on canonical inputs") {
    const Contour square{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
    Polygon hull = convex_hull(square);
    CHECK(hull.size() == 4);
    for (const auto& p : square) CHECK(std::count(hull.begin(), hull.end(), p) == 1);

    Contour with_interior = square;
    with_interior.push_back({5, 5});
    hull = convex_hull(with_interior);
    CHECK(hull.size() == 4);
    CHECK(std::count(hull.begin(), hull.end(), Vec2i{5, 5}) == 0);

    const Contour collinear{{1, 1}, {3, 3}, {5, 5}, {2, 2}};
    hull = convex_hull(collinear);
    REQUIRE(hull.size() == 2);
    CHECK(((hull[0] == Vec2i{1, 1} && hull[1] == Vec2i{5, 5}) ||
           (hull[0] == Vec2i{5, 5} && hull[1] == Vec2i{1, 1})));

    CHECK_THROWS(convex_hull(Contour{}));
}

TEST_CASE("convex_hull contains every input point") {
    auto cross = [](Vec2i o, Vec2i a, Vec2i b) {
        return static_cast<std::int64_t>(a.x - o.x) * (b.y - o.y) -
               static_cast<std::int64_t>(a.y - o.y) * (b.x - o.x);
    };
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        testsupport::Rng rng(seed * 77);
        Contour pts;
        for (int i = 0; i < 100; ++i) pts.push_back({rng.range(0, 60), rng.range(0, 40)});
        const Polygon hull = convex_hull(pts);
        REQUIRE(hull.size() >= 3);
        // vertices are input points
        for (const auto& v : hull) REQUIRE(std::count(pts.begin(), pts.end(), v) > 0);
        // strict turns: no three collinear vertices
        for (std::size_t i = 0; i < hull.size(); ++i) {
            const auto turn = cross(hull[i], hull[(i + 1) % hull.size()],
                                    hull[(i + 2) % hull.size()]);
            REQUIRE(turn > 0);
        }
        // every point inside or on the hull (left of every edge)
        for (const auto& p : pts)
            for (std::size_t i = 0; i < hull.size(); ++i)
                REQUIRE(cross(hull[i], hull[(i + 1) % hull.size()], p) >= 0);
    }
}

TEST_CASE("detect_objects finds separated rectangles with exact boxes") {
    Frame frame = testsupport::solid_frame(100, 80, 10, 10, 10);
    const Box a{10, 12, 40, 40}, b{55, 20, 20, 24};
    testsupport::draw_rect(frame, a, 200, 60, 60);
    testsupport::draw_rect(frame, b, 60, 200, 60);
    const LabelMask labels = label_mask(100, 80, {a, b});

    const auto dets = detect_objects(frame, labels);
    REQUIRE(dets.size() == 2);
    CHECK(dets[0].box == a);  // sorted by (y, x)
    CHECK(dets[1].box == b);
    CHECK(dets[0].area == 40 * 40);
    CHECK(dets[0].centroid.x == doctest::Approx(10 + 20.0));
    // crops come from the frame
    CHECK(dets[0].pixel_crop[0] == 200);
    CHECK(dets[1].pixel_crop[1] == 200);
    for (int y = 0; y < dets[0].box.h; ++y)
        for (int x = 0; x < dets[0].box.w; ++x) REQUIRE(dets[0].mask_crop.at(x, y) == 1);

    // determinism
    const auto again = detect_objects(frame, labels);
    REQUIRE(again.size() == 2);
    CHECK(again[0].box == dets[0].box);
    CHECK(again[1].box == dets[1].box);
}

TEST_CASE("detect_objects drops empty scenes and sub-threshold areas") {
    const Frame frame = testsupport::solid_frame(64, 48, 0, 0, 0);
    CHECK(detect_objects(frame, label_mask(64, 48, {})).empty());

    SegmentationParams params;
    params.min_area_fraction = 0.05;  // 64*48*0.05 = 153.6 pixels
    const LabelMask small = label_mask(64, 48, {{4, 4, 10, 10}});
    CHECK(detect_objects(frame, small, params).empty());
}

TEST_CASE("detection areas never exceed closed-mask foreground") {
    for (std::uint64_t seed = 3; seed <= 12; ++seed) {
        testsupport::Rng rng(seed * 13);
        Frame frame = testsupport::solid_frame(80, 60, 5, 5, 5);
        std::vector<Box> boxes;
        for (int i = 0; i < 4; ++i) {
            const int w = rng.range(4, 20), h = rng.range(4, 16);
            boxes.push_back({rng.range(0, 80 - w), rng.range(0, 60 - h), w, h});
        }
        const LabelMask labels = label_mask(80, 60, boxes);
        SegmentationParams params;
        params.min_area_fraction = 0.0;
        const auto dets = detect_objects(frame, labels, params);

        const BinaryMask closed = morph_close(binarize(labels), params.morph_radius,
                                              params.morph_iterations);
        const auto total_fg = std::count(closed.bits.begin(), closed.bits.end(), 1);
        std::int64_t sum_areas = 0;
        for (const auto& d : dets) {
            sum_areas += d.area;
            // box contains the component: no component pixel outside the box
            for (int y = 0; y < d.box.h; ++y)
                for (int x = 0; x < d.box.w; ++x)
                    if (d.mask_crop.at(x, y)) REQUIRE(closed.at(d.box.x + x, d.box.y + y) == 1);
        }
        REQUIRE(sum_areas <= total_fg);
    }
}
