#pragma once

#include <condition_variable>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vsyn/frame.hpp"
#include "vsyn/tracker.hpp"

namespace vsyn {

/// One object's appearance at one source frame.
struct ObjectFrame {
    std::int64_t source_frame = 0;
    std::int64_t timestamp_ms = 0;
    Box box;
    BinaryMask mask_crop;
    std::vector<std::uint8_t> pixel_crop;
};

struct Tube {
    int id = 0;
    std::vector<ObjectFrame> frames;
    std::int64_t start_frame = 0;
    std::string label;  // mm:ss of the start in the source
    std::shared_ptr<const Frame> background;
};

/// "mm:ss" of a source frame position.
std::string format_timestamp(std::int64_t frame_index, double fps);

/// Converts a terminated, confirmed track into a tube. The whole history,
/// including the tentative prefix, becomes object frames.
Tube build_tube(Track&& track, double fps);

/// Background snapshots taken along the source; tubes reference the one
/// nearest their start frame.
class SnapshotRegistry {
public:
    void record(std::int64_t frame_index, Frame background);
    std::shared_ptr<const Frame> nearest(std::int64_t frame_index) const;
    std::size_t size() const { return snaps_.size(); }

private:
    std::vector<std::pair<std::int64_t, std::shared_ptr<const Frame>>> snaps_;
};

/// Generated tube buffer: completed tubes ordered by (start_frame, id).
///
/// Single producer, single consumer. pop order follows the key order of the
/// final tube set, not admission order; the watermark tells the consumer when
/// the front is final (no live track can still produce an earlier tube).
class TubeBuffer {
public:
    enum class PopState { ready, wait, exhausted };

    explicit TubeBuffer(std::size_t capacity = std::numeric_limits<std::size_t>::max());

    /// Blocks while at capacity. Duplicate tube ids are rejected.
    void admit(Tube tube);

    /// All tubes admitted from now on will have start_frame >= watermark.
    void advance_watermark(std::int64_t watermark);

    /// No further admissions; unblocks waiting consumers.
    void close();

    /// Non-blocking: pops the front tube when it is provably next in
    /// (start_frame, id) order.
    PopState try_pop(Tube& out);

    /// Blocking pop; std::nullopt once closed and drained.
    std::optional<Tube> pop();

    std::size_t size() const;
    std::size_t peak_size() const;
    bool closed() const;

private:
    bool front_ready_locked() const;

    mutable std::mutex mu_;
    std::condition_variable cv_pop_;
    std::condition_variable cv_admit_;
    std::map<std::pair<std::int64_t, int>, Tube> queue_;
    std::set<int> seen_ids_;
    std::size_t capacity_;
    std::size_t peak_ = 0;
    std::int64_t watermark_ = std::numeric_limits<std::int64_t>::min();
    bool closed_ = false;
};

}  // namespace vsyn
