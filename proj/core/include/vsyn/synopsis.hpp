#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vsyn/frame_io.hpp"
#include "vsyn/tube.hpp"

namespace vsyn {

struct ScheduleEntry {
    int tube_id = 0;
    int of_index = 0;  // 0-based position within the tube
    std::int64_t synopsis_frame = 0;
    Box box;
    std::int64_t source_frame = 0;
};

struct Schedule {
    std::vector<ScheduleEntry> entries;
    std::int64_t total_synopsis_frames = 0;  // TSV
};

/// CSV with header tube_id,of_index,synopsis_frame,x,y,w,h,source_frame.
void write_schedule_csv(std::ostream& out, const Schedule& schedule);
std::string schedule_to_csv(const Schedule& schedule);
Schedule read_schedule_csv(std::istream& in);

enum class CollisionMode { box, pixel };

struct SynopsisOptions {
    int cluster_size = 1;  // CS
    CollisionMode collision = CollisionMode::box;
    bool labels = true;
};

/// True when the two object frames overlap under the given mode: positive
/// box intersection area, optionally refined to mask-level overlap.
bool object_frames_collide(const ObjectFrame& a, const ObjectFrame& b, CollisionMode mode);

/// Cluster tube buffer: up to CS tubes in admission order, each with a cursor
/// to its next unplaced object frame.
class ClusterBuffer {
public:
    struct Slot {
        Tube tube;
        std::size_t cursor = 0;
    };

    bool full(int cs) const { return static_cast<int>(slots_.size()) >= cs; }
    bool empty() const { return slots_.empty(); }
    std::size_t size() const { return slots_.size(); }
    void add(Tube tube) { slots_.push_back({std::move(tube), 0}); }
    std::vector<Slot>& slots() { return slots_; }
    const std::vector<Slot>& slots() const { return slots_; }
    /// Drops exhausted tubes, preserving order.
    void remove_finished();

private:
    std::vector<Slot> slots_;
};

/// Greedy tube re-arrangement: fills the cluster from the generated-tube
/// buffer in FIFO order, then stitches every synopsis frame with the maximal
/// prefix-greedy collision-free set of next object frames.
///
/// The emitted schedule is identical to running the offline algorithm on the
/// fully materialized tube list: a frame is only composed once the cluster is
/// full or no tube will ever arrive.
class SynopsisScheduler {
public:
    SynopsisScheduler(SynopsisOptions options, double fps, FrameSink* sink);

    /// Makes all progress possible without blocking; true once finished.
    bool pump(TubeBuffer& gtb);

    /// Blocking drive for a dedicated consumer thread.
    void run(TubeBuffer& gtb);

    bool finished() const { return finished_; }
    std::int64_t frames_emitted() const { return next_frame_; }
    int peak_cluster() const { return peak_cluster_; }
    Schedule take_schedule();

private:
    void compose_frame();

    SynopsisOptions options_;
    double fps_;
    FrameSink* sink_;
    ClusterBuffer ctb_;
    Schedule schedule_;
    std::int64_t next_frame_ = 0;
    int peak_cluster_ = 0;
    bool finished_ = false;
};

/// Runs the scheduler over an already-populated buffer (must be closed).
Schedule run_synopsis(TubeBuffer& gtb, const SynopsisOptions& options, double fps,
                      FrameSink* sink = nullptr);

/// 5x7 bitmap text, white with a 1-pixel black outline. Supports digits,
/// colon, and space; anchored with its top-left at (x, y), clamped inside.
void draw_label(Frame& frame, const std::string& text, int x, int y);

}  // namespace vsyn
