#include "vsyn/background_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace vsyn {

namespace {
constexpr int kSlot = 5;  // weight, mean r/g/b, variance
}

BackgroundModel::BackgroundModel(ModelParams params) : params_(params) {
    if (params_.history < 1 || params_.k_max < 1 || params_.var_threshold <= 0 ||
        params_.background_ratio <= 0 || params_.background_ratio > 1 ||
        params_.shadow_ratio <= 0 || params_.shadow_ratio >= 1)
        throw std::invalid_argument("background_model: bad parameters");
}

LabelMask BackgroundModel::update_and_classify(const Frame& frame, int row_threads) {
    if (frames_seen_ == 0) {
        width_ = frame.width;
        height_ = frame.height;
        comps_.assign(static_cast<std::size_t>(width_) * height_ * params_.k_max * kSlot, 0.0f);
        live_.assign(static_cast<std::size_t>(width_) * height_, 0);
    } else if (frame.width != width_ || frame.height != height_) {
        throw std::runtime_error("background_model: frame dimensions changed mid-stream");
    }

    ++frames_seen_;
    const float alpha =
        1.0f / static_cast<float>(std::min<std::int64_t>(frames_seen_, params_.history));

    LabelMask mask;
    mask.width = width_;
    mask.height = height_;
    mask.labels.resize(static_cast<std::size_t>(width_) * height_);

    if (row_threads <= 1 || height_ < 2 * row_threads) {
        update_rows(frame, alpha, 0, height_, mask);
        return mask;
    }

    std::vector<std::thread> workers;
    workers.reserve(row_threads);
    const int chunk = (height_ + row_threads - 1) / row_threads;
    for (int t = 0; t < row_threads; ++t) {
        const int y0 = t * chunk;
        const int y1 = std::min(height_, y0 + chunk);
        if (y0 >= y1) break;
        workers.emplace_back([this, &frame, alpha, y0, y1, &mask] {
            update_rows(frame, alpha, y0, y1, mask);
        });
    }
    for (auto& w : workers) w.join();
    return mask;
}

void BackgroundModel::update_rows(const Frame& frame, float alpha, int y0, int y1,
                                  LabelMask& out) {
    const int kmax = params_.k_max;
    const float var_thr = static_cast<float>(params_.var_threshold);
    const float bg_ratio = static_cast<float>(params_.background_ratio);
    const float shadow_lo = static_cast<float>(params_.shadow_ratio);
    const float min_w = static_cast<float>(params_.min_weight);
    const float var_init = static_cast<float>(params_.var_init);
    const float var_min = static_cast<float>(params_.var_min);
    const float var_max = static_cast<float>(params_.var_max);
    const float decay = 1.0f - alpha;

    for (int y = y0; y < y1; ++y) {
        const std::uint8_t* src = frame.row(y);
        for (int x = 0; x < width_; ++x) {
            const std::size_t pix = static_cast<std::size_t>(y) * width_ + x;
            float* g = &comps_[pix * kmax * kSlot];
            int live = live_[pix];
            const float pr = src[3 * x], pg = src[3 * x + 1], pb = src[3 * x + 2];

            // match = first component (by weight order) within threshold
            int match = -1;
            float match_d2 = 0.0f;
            for (int k = 0; k < live; ++k) {
                const float* c = g + k * kSlot;
                const float dr = pr - c[1], dg = pg - c[2], db = pb - c[3];
                const float d2 = dr * dr + dg * dg + db * db;
                if (d2 < var_thr * c[4]) {
                    match = k;
                    match_d2 = d2;
                    break;
                }
            }

            // background components: greedy prefix while cumulative weight
            // stays within bg_ratio; the heaviest always qualifies
            PixelLabel label = PixelLabel::foreground;
            int bg_count = 0;
            {
                float cum = 0.0f;
                for (int k = 0; k < live; ++k) {
                    if (k > 0 && cum + g[k * kSlot] > bg_ratio) break;
                    cum += g[k * kSlot];
                    ++bg_count;
                }
            }
            if (match >= 0 && match < bg_count) label = PixelLabel::background;

            if (label == PixelLabel::foreground) {
                // shadow: pixel is a uniformly darkened background mean
                for (int k = 0; k < bg_count; ++k) {
                    const float* c = g + k * kSlot;
                    const float den = c[1] * c[1] + c[2] * c[2] + c[3] * c[3];
                    if (den <= 0.0f) continue;
                    const float a = (pr * c[1] + pg * c[2] + pb * c[3]) / den;
                    if (a < shadow_lo || a >= 1.0f) continue;
                    const float dr = pr - a * c[1], dg = pg - a * c[2], db = pb - a * c[3];
                    if (dr * dr + dg * dg + db * db < var_thr * c[4] * a * a) {
                        label = PixelLabel::shadow;
                        break;
                    }
                }
            }

            // update weights, matched component stats, and ordering
            for (int k = 0; k < live; ++k) g[k * kSlot] *= decay;
            if (match >= 0) {
                float* c = g + match * kSlot;
                c[0] += alpha;
                const float rho = alpha / c[0];
                c[1] += rho * (pr - c[1]);
                c[2] += rho * (pg - c[2]);
                c[3] += rho * (pb - c[3]);
                c[4] = std::clamp(c[4] + rho * (match_d2 - c[4]), var_min, var_max);
                int k = match;
                while (k > 0 && g[k * kSlot] > g[(k - 1) * kSlot]) {
                    for (int s = 0; s < kSlot; ++s) std::swap(g[k * kSlot + s], g[(k - 1) * kSlot + s]);
                    --k;
                }
                match = k;
            } else {
                if (live == kmax) --live;  // evict lowest-weight slot
                float* c = g + live * kSlot;
                c[0] = alpha;
                c[1] = pr;
                c[2] = pg;
                c[3] = pb;
                c[4] = var_init;
                int k = live;
                ++live;
                while (k > 0 && g[k * kSlot] > g[(k - 1) * kSlot]) {
                    for (int s = 0; s < kSlot; ++s) std::swap(g[k * kSlot + s], g[(k - 1) * kSlot + s]);
                    --k;
                }
                match = k;
            }

            // cull trailing low-weight components (never the one just touched)
            while (live > 1 && live - 1 != match && g[(live - 1) * kSlot] < min_w) --live;

            float sum = 0.0f;
            for (int k = 0; k < live; ++k) sum += g[k * kSlot];
            if (sum > 0.0f) {
                const float inv = 1.0f / sum;
                for (int k = 0; k < live; ++k) g[k * kSlot] *= inv;
            }
            live_[pix] = static_cast<std::uint8_t>(live);
            out.labels[pix] = label;
        }
    }
}

Frame BackgroundModel::background_image() const {
    if (frames_seen_ == 0)
        throw std::runtime_error("background_model: no frames seen yet");
    Frame bg(width_, height_);
    const int kmax = params_.k_max;
    for (std::size_t pix = 0; pix < live_.size(); ++pix) {
        const float* c = &comps_[pix * kmax * kSlot];
        bg.pixels[pix * 3] = static_cast<std::uint8_t>(std::lround(std::clamp(c[1], 0.0f, 255.0f)));
        bg.pixels[pix * 3 + 1] = static_cast<std::uint8_t>(std::lround(std::clamp(c[2], 0.0f, 255.0f)));
        bg.pixels[pix * 3 + 2] = static_cast<std::uint8_t>(std::lround(std::clamp(c[3], 0.0f, 255.0f)));
    }
    return bg;
}

double BackgroundModel::weight_sum(int x, int y) const {
    const std::size_t pix = static_cast<std::size_t>(y) * width_ + x;
    const float* g = &comps_[pix * params_.k_max * kSlot];
    double sum = 0.0;
    for (int k = 0; k < live_[pix]; ++k) sum += g[k * kSlot];
    return sum;
}

int BackgroundModel::live_count(int x, int y) const {
    return live_[static_cast<std::size_t>(y) * width_ + x];
}

}  // namespace vsyn
