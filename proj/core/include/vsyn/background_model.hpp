#pragma once

#include <cstdint>
#include <vector>

#include "vsyn/frame.hpp"

namespace vsyn {

enum class PixelLabel : std::uint8_t { background = 0, foreground = 1, shadow = 2 };

struct LabelMask {
    int width = 0;
    int height = 0;
    std::vector<PixelLabel> labels;

    PixelLabel at(int x, int y) const {
        return labels[static_cast<std::size_t>(y) * width + x];
    }
};

struct ModelParams {
    int history = 100;             // sample window; learning rate is 1/min(t, history)
    double var_threshold = 25.0;   // squared color distance must stay under this times the variance
    double shadow_ratio = 0.5;     // darkest brightness ratio still counted as shadow
    int k_max = 5;
    double background_ratio = 0.9; // cumulative-weight cutoff for background components
    double var_init = 15.0 * 15.0;
    double min_weight = 0.01;      // components below this get culled
    double var_min = 4.0;
    double var_max = 5.0 * 15.0 * 15.0;
};

/// Per-pixel adaptive mixture of Gaussians with shadow relabeling.
///
/// Components are kept sorted by weight. A pixel is background when it
/// matches one of the top components whose cumulative weight stays within
/// background_ratio (the heaviest component always qualifies). Unmatched
/// pixels spawn a new component and come out foreground; foreground pixels
/// that are a uniformly darkened copy of a background mean are relabeled
/// shadow.
class BackgroundModel {
public:
    explicit BackgroundModel(ModelParams params = {});

    /// Advances the model one frame and labels every pixel. The first frame
    /// initializes the model (and comes out all foreground). row_threads > 1
    /// splits the pixel grid by rows; the result is bit-identical to the
    /// sequential pass.
    LabelMask update_and_classify(const Frame& frame, int row_threads = 1);

    /// Mean of the highest-weight component per pixel, rounded.
    Frame background_image() const;

    const ModelParams& params() const { return params_; }
    std::int64_t frames_seen() const { return frames_seen_; }
    int width() const { return width_; }
    int height() const { return height_; }

    /// Sum of component weights at one pixel (1 +/- 1e-6 after any update).
    double weight_sum(int x, int y) const;
    int live_count(int x, int y) const;

private:
    void update_rows(const Frame& frame, float alpha, int y0, int y1, LabelMask& out);

    ModelParams params_;
    int width_ = 0;
    int height_ = 0;
    std::int64_t frames_seen_ = 0;
    // per pixel: k_max slots of {weight, mean r, mean g, mean b, variance}
    std::vector<float> comps_;
    std::vector<std::uint8_t> live_;
};

}  // namespace vsyn
