#include "vsyn/tracker.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace vsyn {

Vec2 predict_displacement(std::span<const Vec2> centers) {
    const std::size_t i = centers.size();
    if (i < 2) return {0.0, 0.0};
    Vec2 num{0.0, 0.0};
    double den = 0.0;
    if (i <= 10) {
        for (std::size_t n = 1; n <= i - 1; ++n) {
            const Vec2 diff = centers[n] - centers[n - 1];
            num = num + diff * static_cast<double>(n);
            den += static_cast<double>(n);
        }
    } else {
        for (std::size_t n = 1; n <= 9; ++n) {
            const Vec2 diff = centers[i - n] - centers[i - n - 1];
            num = num + diff * static_cast<double>(10 - n);
            den += static_cast<double>(n);
        }
    }
    return {num.x / den, num.y / den};
}

Vec2 predict_center(const Track& track) {
    if (track.centers.empty()) throw std::invalid_argument("tracker: track has no centers");
    return track.centers.back() + predict_displacement(track.centers);
}

Association associate(std::span<const Vec2> predictions, std::span<const double> gates,
                      std::span<const Detection> detections) {
    struct Pair {
        double dist;
        int track;
        int det;
    };
    std::vector<Pair> pairs;
    for (int t = 0; t < static_cast<int>(predictions.size()); ++t) {
        for (int d = 0; d < static_cast<int>(detections.size()); ++d) {
            const double dist = distance(predictions[t], detections[d].centroid);
            if (dist <= gates[t]) pairs.push_back({dist, t, d});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.track != b.track) return a.track < b.track;
        return a.det < b.det;
    });

    Association out;
    std::vector<char> track_used(predictions.size(), 0), det_used(detections.size(), 0);
    for (const auto& p : pairs) {
        if (track_used[p.track] || det_used[p.det]) continue;
        track_used[p.track] = det_used[p.det] = 1;
        out.matches.emplace_back(p.track, p.det);
    }
    for (int t = 0; t < static_cast<int>(predictions.size()); ++t)
        if (!track_used[t]) out.unmatched_tracks.push_back(t);
    for (int d = 0; d < static_cast<int>(detections.size()); ++d)
        if (!det_used[d]) out.unmatched_detections.push_back(d);
    return out;
}

Tracker::Tracker(TrackerParams params) : params_(params) {
    if (params_.confirm_frames < 1 || params_.max_misses < 0 || params_.gate_factor <= 0)
        throw std::invalid_argument("tracker: bad parameters");
}

TrackEvents Tracker::step(std::span<const Detection> detections, std::int64_t frame_index) {
    if (frame_index <= last_frame_)
        throw std::runtime_error("tracker: non-monotonic frame index");
    last_frame_ = frame_index;

    // predicted positions; coasting tracks extrapolate one displacement per miss
    std::vector<Vec2> predictions(tracks_.size());
    std::vector<double> gates(tracks_.size());
    for (std::size_t t = 0; t < tracks_.size(); ++t) {
        const Track& tr = tracks_[t];
        const Vec2 d = predict_displacement(tr.centers);
        predictions[t] = tr.centers.back() + d * static_cast<double>(tr.misses + 1);
        gates[t] = params_.gate_factor * diagonal(tr.history.back().second.box);
    }

    const Association assoc = associate(predictions, gates, detections);

    TrackEvents events;
    for (const auto& [t, d] : assoc.matches) {
        Track& tr = tracks_[t];
        tr.history.emplace_back(frame_index, detections[d]);
        tr.centers.push_back(detections[d].centroid);
        tr.misses = 0;
    }
    for (int t : assoc.unmatched_tracks) {
        Track& tr = tracks_[t];
        ++tr.misses;
        // "consecutively tracked" means zero gaps: a tentative miss terminates
        if (tr.state == TrackState::tentative || tr.misses > params_.max_misses)
            tr.state = TrackState::terminated;
    }
    for (int d : assoc.unmatched_detections) {
        Track tr;
        tr.first_frame = frame_index;
        tr.history.emplace_back(frame_index, detections[d]);
        tr.centers.push_back(detections[d].centroid);
        tracks_.push_back(std::move(tr));
    }
    // ids follow track creation order within a frame
    for (auto& tr : tracks_) {
        if (tr.state == TrackState::tentative &&
            static_cast<int>(tr.history.size()) >= params_.confirm_frames) {
            tr.state = TrackState::confirmed;
            tr.id = next_id_++;
            events.confirmed_ids.push_back(tr.id);
        }
    }

    std::vector<Track> live;
    live.reserve(tracks_.size());
    for (auto& tr : tracks_) {
        if (tr.state == TrackState::terminated)
            events.terminated.push_back(std::move(tr));
        else
            live.push_back(std::move(tr));
    }
    tracks_ = std::move(live);
    return events;
}

TrackEvents Tracker::flush() {
    TrackEvents events;
    for (auto& tr : tracks_) {
        tr.state = TrackState::terminated;
        events.terminated.push_back(std::move(tr));
    }
    tracks_.clear();
    return events;
}

std::int64_t Tracker::min_live_first_frame(std::int64_t fallback) const {
    std::int64_t m = fallback;
    for (const auto& tr : tracks_) m = std::min(m, tr.first_frame);
    return m;
}

}  // namespace vsyn
