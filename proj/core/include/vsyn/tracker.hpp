#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vsyn/segmentation.hpp"

namespace vsyn {

enum class TrackState : std::uint8_t { tentative, confirmed, terminated };

struct Track {
    int id = 0;  // assigned at confirmation; 0 while tentative
    TrackState state = TrackState::tentative;
    std::vector<std::pair<std::int64_t, Detection>> history;
    std::vector<Vec2> centers;  // box centers, one per history entry
    std::int64_t first_frame = 0;
    int misses = 0;
};

struct TrackerParams {
    int confirm_frames = 18;  // round(fps * 1 s)
    int max_misses = 5;       // coasting budget for confirmed tracks
    double gate_factor = 1.0; // gate = factor * diagonal of the last box
};

/// Recency-weighted mean of consecutive center differences. The last 9
/// differences carry weights 9..1 once more than 10 centers exist; with
/// fewer, difference n (from the oldest) carries weight n. Fewer than two
/// centers give a zero displacement.
Vec2 predict_displacement(std::span<const Vec2> centers);

/// Last center plus predicted displacement; a single center predicts itself.
Vec2 predict_center(const Track& track);

struct Association {
    std::vector<std::pair<int, int>> matches;  // (track index, detection index)
    std::vector<int> unmatched_tracks;
    std::vector<int> unmatched_detections;
};

/// Globally greedy nearest-pair matching between predicted centers and
/// detection centroids, gated per track; ties break on (track, detection)
/// index.
Association associate(std::span<const Vec2> predictions, std::span<const double> gates,
                      std::span<const Detection> detections);

struct TrackEvents {
    std::vector<int> confirmed_ids;
    std::vector<Track> terminated;  // moved-out tracks, confirmed and not
};

class Tracker {
public:
    explicit Tracker(TrackerParams params);

    /// Advances one frame. frame_index must be strictly increasing.
    TrackEvents step(std::span<const Detection> detections, std::int64_t frame_index);

    /// Terminates every live track (end of stream).
    TrackEvents flush();

    const std::vector<Track>& live_tracks() const { return tracks_; }
    /// Smallest first_frame among live tracks, or fallback when none live.
    std::int64_t min_live_first_frame(std::int64_t fallback) const;
    int next_id() const { return next_id_; }

private:
    TrackerParams params_;
    std::vector<Track> tracks_;
    int next_id_ = 1;
    std::int64_t last_frame_ = -1;
};

}  // namespace vsyn
