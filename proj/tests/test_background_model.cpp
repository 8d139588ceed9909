#include <doctest.h>

#include <cmath>

#include "support/test_util.hpp"
#include "vsyn/background_model.hpp"
#include "vsyn/synthgen.hpp"

using namespace vsyn;
using testsupport::solid_frame;

namespace {

double foreground_fraction(const LabelMask& mask) {
    std::size_t fg = 0;
    for (const auto label : mask.labels)
        if (label == PixelLabel::foreground) ++fg;
    return static_cast<double>(fg) / static_cast<double>(mask.labels.size());
}

double foreground_fraction_in(const LabelMask& mask, const Box& box) {
    std::size_t fg = 0;
    for (int y = box.y; y < box.y + box.h; ++y)
        for (int x = box.x; x < box.x + box.w; ++x)
            if (mask.at(x, y) == PixelLabel::foreground) ++fg;
    return static_cast<double>(fg) / static_cast<double>(area(box));
}

}  // namespace

TEST_CASE("stationary scene converges to all background") {
    BackgroundModel model;
    const Frame gray = solid_frame(24, 18, 96, 96, 96);
    LabelMask mask;
    for (int i = 0; i < 200; ++i) mask = model.update_and_classify(gray);
    CHECK(foreground_fraction(mask) == 0.0);
    // the very first frame has nothing to match and is all foreground
    BackgroundModel fresh;
    CHECK(foreground_fraction(fresh.update_and_classify(gray)) == 1.0);
}

TEST_CASE("brightened patch on a converged model is foreground") {
    BackgroundModel model;
    const Frame gray = solid_frame(40, 30, 96, 96, 96);
    for (int i = 0; i < 120; ++i) model.update_and_classify(gray);
    Frame lit = gray;
    const Box patch{5, 5, 20, 20};
    testsupport::draw_rect(lit, patch, 196, 196, 196);
    const LabelMask mask = model.update_and_classify(lit);
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 40; ++x) {
            const bool in_patch = x >= patch.x && x < patch.x + patch.w && y >= patch.y &&
                                  y < patch.y + patch.h;
            REQUIRE(mask.at(x, y) == (in_patch ? PixelLabel::foreground : PixelLabel::background));
        }
}

TEST_CASE("uniformly darkened patch is relabeled shadow") {
    BackgroundModel model;
    const Frame scene = solid_frame(40, 30, 120, 140, 160);
    for (int i = 0; i < 120; ++i) model.update_and_classify(scene);
    const Frame background = model.background_image();

    Frame shadowed = scene;
    const Box patch{8, 6, 16, 12};
    testsupport::draw_rect(shadowed, patch, 72, 84, 96);  // exactly 0.6x
    const LabelMask mask = model.update_and_classify(shadowed);

    // reference recomputation of the ratio test against the converged mean
    for (int y = patch.y; y < patch.y + patch.h; ++y)
        for (int x = patch.x; x < patch.x + patch.w; ++x) {
            const std::uint8_t* m = background.at(x, y);
            const std::uint8_t* p = shadowed.at(x, y);
            const double den = double(m[0]) * m[0] + double(m[1]) * m[1] + double(m[2]) * m[2];
            const double a =
                (double(p[0]) * m[0] + double(p[1]) * m[1] + double(p[2]) * m[2]) / den;
            REQUIRE(a >= 0.5);
            REQUIRE(a < 1.0);
            REQUIRE(mask.at(x, y) == PixelLabel::shadow);
        }
    CHECK(mask.at(0, 0) == PixelLabel::background);
}

TEST_CASE("ratio below the shadow floor stays foreground") {
    BackgroundModel model;
    const Frame scene = solid_frame(16, 16, 200, 200, 200);
    for (int i = 0; i < 120; ++i) model.update_and_classify(scene);
    Frame dark = scene;
    testsupport::draw_rect(dark, {4, 4, 8, 8}, 80, 80, 80);  // 0.4x, more than twice darker
    const LabelMask mask = model.update_and_classify(dark);
    CHECK(mask.at(8, 8) == PixelLabel::foreground);
}

TEST_CASE("background image tracks the dominant component") {
    BackgroundModel model;
    const Frame gray = solid_frame(12, 10, 80, 90, 100);

    model.update_and_classify(gray);
    Frame bg = model.background_image();  // single-sample model
    CHECK(bg.pixels == gray.pixels);

    for (int i = 0; i < 199; ++i) model.update_and_classify(gray);
    bg = model.background_image();
    CHECK(bg.pixels == gray.pixels);

    // permanent scene change held for at least `history` frames
    const Frame changed = solid_frame(12, 10, 170, 40, 220);
    for (int i = 0; i < 150; ++i) model.update_and_classify(changed);
    bg = model.background_image();
    for (std::size_t i = 0; i < bg.pixels.size(); ++i)
        REQUIRE(std::abs(int(bg.pixels[i]) - int(changed.pixels[i])) <= 2);
}

TEST_CASE("background_image before any frame throws") {
    BackgroundModel model;
    CHECK_THROWS(model.background_image());
}

TEST_CASE("dimension change mid-stream throws") {
    BackgroundModel model;
    model.update_and_classify(Frame(8, 8));
    CHECK_THROWS(model.update_and_classify(Frame(10, 8)));
}

TEST_CASE("weights stay normalized through noisy updates") {
    SceneSpec spec;
    spec.width = 16;
    spec.height = 12;
    spec.duration_frames = 80;
    spec.noise_sigma = 6.0;
    spec.seed = 99;
    BackgroundModel model;
    for (int i = 0; i < 80; ++i) {
        model.update_and_classify(render_frame(spec, i));
        for (int y = 0; y < 12; ++y)
            for (int x = 0; x < 16; ++x) REQUIRE(model.weight_sum(x, y) == doctest::Approx(1.0).epsilon(1e-6));
    }
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 16; ++x) REQUIRE(model.live_count(x, y) <= model.params().k_max);
}

TEST_CASE("classification is a pure function of state and frame") {
    SceneSpec spec;
    spec.width = 20;
    spec.height = 16;
    spec.duration_frames = 60;
    spec.noise_sigma = 3.0;
    spec.seed = 5;
    BackgroundModel model;
    for (int i = 0; i < 40; ++i) model.update_and_classify(render_frame(spec, i));

    BackgroundModel clone = model;  // value semantics: full state copy
    const Frame next = render_frame(spec, 40);
    const LabelMask a = model.update_and_classify(next);
    const LabelMask b = clone.update_and_classify(next);
    CHECK(a.labels == b.labels);
}

TEST_CASE("row-parallel update is bit-identical to sequential") {
    SceneSpec spec;
    spec.width = 32;
    spec.height = 24;
    spec.duration_frames = 50;
    spec.noise_sigma = 4.0;
    spec.seed = 17;
    BackgroundModel seq, par;
    for (int i = 0; i < 50; ++i) {
        const Frame f = render_frame(spec, i);
        const LabelMask a = seq.update_and_classify(f, 1);
        const LabelMask b = par.update_and_classify(f, 3);
        REQUIRE(a.labels == b.labels);
    }
    CHECK(seq.background_image().pixels == par.background_image().pixels);
}

TEST_CASE("sensor noise is absorbed, a static newcomer is absorbed slowly") {
    SceneSpec spec;
    spec.width = 48;
    spec.height = 36;
    spec.duration_frames = 400;
    spec.background = {90, 100, 110};
    spec.noise_sigma = 2.0;
    spec.seed = 31;
    SceneObject obj;
    obj.id = 1;
    obj.color = {220, 40, 40};
    obj.w = 16;
    obj.h = 12;
    obj.entry_frame = 200;
    obj.waypoints = {{200, {24.0, 18.0}}, {399, {24.0, 18.0}}};  // parked
    spec.objects.push_back(obj);
    const Box rect = *object_box_at(spec, obj, 200);

    BackgroundModel model;
    double late_noise_fg = 0.0;
    int fg_first20 = 0, fg_after150 = 0, checked_late = 0;
    for (int i = 0; i < 400; ++i) {
        const LabelMask mask = model.update_and_classify(render_frame(spec, i));
        if (i >= 150 && i < 200) late_noise_fg = std::max(late_noise_fg, foreground_fraction(mask));
        if (i >= 200 && i < 220 && foreground_fraction_in(mask, rect) >= 0.95) ++fg_first20;
        if (i >= 370) {
            ++checked_late;
            if (foreground_fraction_in(mask, rect) < 0.05) ++fg_after150;
        }
    }
    CHECK(late_noise_fg < 0.005);
    CHECK(fg_first20 == 20);
    CHECK(fg_after150 == checked_late);
}
