#include "vsyn/tube.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace vsyn {

std::string format_timestamp(std::int64_t frame_index, double fps) {
    const std::int64_t total_s = static_cast<std::int64_t>(frame_index / fps);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02lld:%02lld", static_cast<long long>(total_s / 60),
                  static_cast<long long>(total_s % 60));
    return buf;
}

Tube build_tube(Track&& track, double fps) {
    if (track.id == 0 || track.history.empty())
        throw std::invalid_argument("tube_store: only confirmed tracks become tubes");
    Tube tube;
    tube.id = track.id;
    tube.start_frame = track.history.front().first;
    tube.label = format_timestamp(tube.start_frame, fps);
    tube.frames.reserve(track.history.size());
    for (auto& [frame_index, det] : track.history) {
        ObjectFrame of;
        of.source_frame = frame_index;
        of.timestamp_ms = frame_timestamp_ms(frame_index, fps);
        of.box = det.box;
        of.mask_crop = std::move(det.mask_crop);
        of.pixel_crop = std::move(det.pixel_crop);
        tube.frames.push_back(std::move(of));
    }
    return tube;
}

void SnapshotRegistry::record(std::int64_t frame_index, Frame background) {
    snaps_.emplace_back(frame_index, std::make_shared<const Frame>(std::move(background)));
}

std::shared_ptr<const Frame> SnapshotRegistry::nearest(std::int64_t frame_index) const {
    std::shared_ptr<const Frame> best;
    std::int64_t best_dist = std::numeric_limits<std::int64_t>::max();
    for (const auto& [idx, frame] : snaps_) {
        const std::int64_t dist = std::llabs(idx - frame_index);
        if (dist < best_dist) {
            best_dist = dist;
            best = frame;
        }
    }
    return best;
}

TubeBuffer::TubeBuffer(std::size_t capacity) : capacity_(capacity) {}

void TubeBuffer::admit(Tube tube) {
    std::unique_lock lock(mu_);
    // back-pressure only while the consumer can actually drain; when the
    // watermark blocks the front, admitting more is the only way forward
    cv_admit_.wait(lock,
                   [&] { return closed_ || queue_.size() < capacity_ || !front_ready_locked(); });
    if (closed_) throw std::runtime_error("tube_store: admit after close");
    if (!seen_ids_.insert(tube.id).second)
        throw std::runtime_error("tube_store: duplicate tube id " + std::to_string(tube.id));
    queue_.emplace(std::make_pair(tube.start_frame, tube.id), std::move(tube));
    peak_ = std::max(peak_, queue_.size());
    cv_pop_.notify_one();
}

void TubeBuffer::advance_watermark(std::int64_t watermark) {
    std::lock_guard lock(mu_);
    watermark_ = std::max(watermark_, watermark);
    cv_pop_.notify_one();
}

void TubeBuffer::close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    cv_pop_.notify_all();
    cv_admit_.notify_all();
}

bool TubeBuffer::front_ready_locked() const {
    if (queue_.empty()) return false;
    return closed_ || queue_.begin()->first.first < watermark_;
}

TubeBuffer::PopState TubeBuffer::try_pop(Tube& out) {
    std::lock_guard lock(mu_);
    if (front_ready_locked()) {
        out = std::move(queue_.begin()->second);
        queue_.erase(queue_.begin());
        cv_admit_.notify_one();
        return PopState::ready;
    }
    return closed_ && queue_.empty() ? PopState::exhausted : PopState::wait;
}

std::optional<Tube> TubeBuffer::pop() {
    std::unique_lock lock(mu_);
    cv_pop_.wait(lock, [&] { return front_ready_locked() || (closed_ && queue_.empty()); });
    if (queue_.empty()) return std::nullopt;
    Tube out = std::move(queue_.begin()->second);
    queue_.erase(queue_.begin());
    cv_admit_.notify_one();
    return out;
}

std::size_t TubeBuffer::size() const {
    std::lock_guard lock(mu_);
    return queue_.size();
}

std::size_t TubeBuffer::peak_size() const {
    std::lock_guard lock(mu_);
    return peak_;
}

bool TubeBuffer::closed() const {
    std::lock_guard lock(mu_);
    return closed_;
}

}  // namespace vsyn
