#pragma once

// Offline reference for tube re-arrangement: materializes every tube up
// front and steps the greedy placement loop literally. Kept independent of
// the streaming scheduler so the two can cross-check each other.

#include <algorithm>
#include <deque>
#include <vector>

#include "vsyn/synopsis.hpp"

namespace testsupport {

inline bool rects_overlap(const vsyn::Box& a, const vsyn::Box& b) {
    const int x0 = a.x > b.x ? a.x : b.x;
    const int y0 = a.y > b.y ? a.y : b.y;
    const int x1 = (a.x + a.w) < (b.x + b.w) ? (a.x + a.w) : (b.x + b.w);
    const int y1 = (a.y + a.h) < (b.y + b.h) ? (a.y + a.h) : (b.y + b.h);
    return x1 > x0 && y1 > y0;
}

inline vsyn::Schedule naive_schedule(std::vector<vsyn::Tube> tubes, int cluster_size) {
    std::sort(tubes.begin(), tubes.end(), [](const vsyn::Tube& a, const vsyn::Tube& b) {
        return a.start_frame != b.start_frame ? a.start_frame < b.start_frame : a.id < b.id;
    });
    std::deque<vsyn::Tube> gtb(std::make_move_iterator(tubes.begin()),
                               std::make_move_iterator(tubes.end()));

    struct Slot {
        vsyn::Tube tube;
        std::size_t cursor = 0;
    };
    std::vector<Slot> ctb;
    vsyn::Schedule schedule;
    long long n = -1;

    for (;;) {
        while (static_cast<int>(ctb.size()) < cluster_size && !gtb.empty()) {
            ctb.push_back({std::move(gtb.front()), 0});
            gtb.pop_front();
        }
        if (ctb.empty()) break;
        ++n;
        std::vector<vsyn::Box> placed;
        for (auto& slot : ctb) {
            const vsyn::ObjectFrame& of = slot.tube.frames[slot.cursor];
            bool hit = false;
            for (const vsyn::Box& p : placed)
                if (rects_overlap(of.box, p)) {
                    hit = true;
                    break;
                }
            if (hit) continue;
            placed.push_back(of.box);
            schedule.entries.push_back({slot.tube.id, static_cast<int>(slot.cursor), n, of.box,
                                        of.source_frame});
            ++slot.cursor;
        }
        std::erase_if(ctb, [](const Slot& s) { return s.cursor >= s.tube.frames.size(); });
    }
    schedule.total_synopsis_frames = n + 1;
    return schedule;
}

}  // namespace testsupport
