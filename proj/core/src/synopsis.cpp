#include "vsyn/synopsis.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace vsyn {

void write_schedule_csv(std::ostream& out, const Schedule& schedule) {
    out << "tube_id,of_index,synopsis_frame,x,y,w,h,source_frame\n";
    for (const auto& e : schedule.entries)
        out << e.tube_id << ',' << e.of_index << ',' << e.synopsis_frame << ',' << e.box.x << ','
            << e.box.y << ',' << e.box.w << ',' << e.box.h << ',' << e.source_frame << '\n';
}

std::string schedule_to_csv(const Schedule& schedule) {
    std::ostringstream out;
    write_schedule_csv(out, schedule);
    return out.str();
}

Schedule read_schedule_csv(std::istream& in) {
    Schedule s;
    std::string line;
    if (!std::getline(in, line) || line != "tube_id,of_index,synopsis_frame,x,y,w,h,source_frame")
        throw std::runtime_error("synopsis: bad schedule CSV header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ScheduleEntry e;
        long long v[8];
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int i = 0; i < 8; ++i) {
            auto [next, ec] = std::from_chars(p, end, v[i]);
            if (ec != std::errc() || (i < 7 && (next == end || *next != ',')))
                throw std::runtime_error("synopsis: bad schedule CSV row: " + line);
            p = next + (i < 7 ? 1 : 0);
        }
        e.tube_id = static_cast<int>(v[0]);
        e.of_index = static_cast<int>(v[1]);
        e.synopsis_frame = v[2];
        e.box = {static_cast<int>(v[3]), static_cast<int>(v[4]), static_cast<int>(v[5]),
                 static_cast<int>(v[6])};
        e.source_frame = v[7];
        s.entries.push_back(e);
        s.total_synopsis_frames = std::max(s.total_synopsis_frames, e.synopsis_frame + 1);
    }
    return s;
}

bool object_frames_collide(const ObjectFrame& a, const ObjectFrame& b, CollisionMode mode) {
    if (!boxes_collide(a.box, b.box)) return false;
    if (mode == CollisionMode::box) return true;
    const int x0 = std::max(a.box.x, b.box.x);
    const int y0 = std::max(a.box.y, b.box.y);
    const int x1 = std::min(a.box.x + a.box.w, b.box.x + b.box.w);
    const int y1 = std::min(a.box.y + a.box.h, b.box.y + b.box.h);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
            if (a.mask_crop.at(x - a.box.x, y - a.box.y) && b.mask_crop.at(x - b.box.x, y - b.box.y))
                return true;
    return false;
}

void ClusterBuffer::remove_finished() {
    std::erase_if(slots_, [](const Slot& s) { return s.cursor >= s.tube.frames.size(); });
}

// ------------------------------------------------------------------ labels

namespace {

// 5x7 glyphs for '0'-'9' and ':'
constexpr std::uint8_t kFont[11][7] = {
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E},  // 0
    {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},  // 1
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F},  // 2
    {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E},  // 3
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02},  // 4
    {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},  // 5
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E},  // 6
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},  // 7
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E},  // 8
    {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},  // 9
    {0x00, 0x04, 0x04, 0x00, 0x04, 0x04, 0x00},  // :
};

int glyph_index(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c == ':') return 10;
    return -1;
}

void put_pixel(Frame& f, int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (x < 0 || y < 0 || x >= f.width || y >= f.height) return;
    std::uint8_t* p = f.at(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
}

}  // namespace

void draw_label(Frame& frame, const std::string& text, int x, int y) {
    const int text_w = static_cast<int>(text.size()) * 6 - 1;
    x = std::clamp(x, 1, std::max(1, frame.width - text_w - 1));
    y = std::clamp(y, 1, std::max(1, frame.height - 8));
    for (std::size_t i = 0; i < text.size(); ++i) {
        const int gi = glyph_index(text[i]);
        if (gi < 0) continue;
        const int gx = x + static_cast<int>(i) * 6;
        for (int row = 0; row < 7; ++row) {
            for (int col = 0; col < 5; ++col) {
                if (!(kFont[gi][row] & (1 << (4 - col)))) continue;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx)
                        if (dx || dy) put_pixel(frame, gx + col + dx, y + row + dy, 0, 0, 0);
            }
        }
    }
    for (std::size_t i = 0; i < text.size(); ++i) {
        const int gi = glyph_index(text[i]);
        if (gi < 0) continue;
        const int gx = x + static_cast<int>(i) * 6;
        for (int row = 0; row < 7; ++row)
            for (int col = 0; col < 5; ++col)
                if (kFont[gi][row] & (1 << (4 - col)))
                    put_pixel(frame, gx + col, y + row, 255, 255, 255);
    }
}

// --------------------------------------------------------------- scheduler

SynopsisScheduler::SynopsisScheduler(SynopsisOptions options, double fps, FrameSink* sink)
    : options_(options), fps_(fps), sink_(sink) {
    if (options_.cluster_size < 1) throw std::invalid_argument("synopsis: cluster size must be >= 1");
}

void SynopsisScheduler::compose_frame() {
    const std::int64_t n = next_frame_++;
    std::vector<const ObjectFrame*> placed;
    std::vector<const Tube*> placed_tubes;

    for (auto& slot : ctb_.slots()) {
        const ObjectFrame& of = slot.tube.frames[slot.cursor];
        bool collides = false;
        for (const ObjectFrame* p : placed) {
            if (object_frames_collide(of, *p, options_.collision)) {
                collides = true;
                break;
            }
        }
        if (collides) continue;  // retried next frame: the flicker mechanism
        placed.push_back(&of);
        placed_tubes.push_back(&slot.tube);
        schedule_.entries.push_back(
            {slot.tube.id, static_cast<int>(slot.cursor), n, of.box, of.source_frame});
        ++slot.cursor;
    }

    if (sink_) {
        Frame out;
        const std::shared_ptr<const Frame>& bg = ctb_.slots().front().tube.background;
        if (bg) {
            out = *bg;
        } else {
            out = Frame(sink_->meta().width, sink_->meta().height);
        }
        out.index = n;
        out.timestamp_ms = frame_timestamp_ms(n, fps_);
        for (const ObjectFrame* of : placed) {
            for (int y = 0; y < of->box.h; ++y) {
                const int fy = of->box.y + y;
                if (fy < 0 || fy >= out.height) continue;
                for (int x = 0; x < of->box.w; ++x) {
                    const int fx = of->box.x + x;
                    if (fx < 0 || fx >= out.width) continue;
                    if (!of->mask_crop.at(x, y)) continue;
                    const std::uint8_t* src =
                        of->pixel_crop.data() + (static_cast<std::size_t>(y) * of->box.w + x) * 3;
                    std::uint8_t* dst = out.at(fx, fy);
                    dst[0] = src[0];
                    dst[1] = src[1];
                    dst[2] = src[2];
                }
            }
        }
        if (options_.labels) {
            for (std::size_t i = 0; i < placed.size(); ++i)
                draw_label(out, placed_tubes[i]->label, placed[i]->box.x, placed[i]->box.y - 9);
        }
        sink_->write(out);
    }

    ctb_.remove_finished();
    schedule_.total_synopsis_frames = next_frame_;
}

bool SynopsisScheduler::pump(TubeBuffer& gtb) {
    if (finished_) return true;
    for (;;) {
        bool exhausted = false;
        while (!ctb_.full(options_.cluster_size)) {
            Tube tube;
            const auto state = gtb.try_pop(tube);
            if (state == TubeBuffer::PopState::ready) {
                ctb_.add(std::move(tube));
                peak_cluster_ = std::max(peak_cluster_, static_cast<int>(ctb_.size()));
            } else if (state == TubeBuffer::PopState::exhausted) {
                exhausted = true;
                break;
            } else {
                return false;  // an earlier tube may still arrive; hold composition
            }
        }
        if (ctb_.empty()) {
            finished_ = exhausted;
            return finished_;
        }
        compose_frame();
    }
}

void SynopsisScheduler::run(TubeBuffer& gtb) {
    while (!pump(gtb)) {
        Tube tube;
        auto popped = gtb.pop();  // blocks until state changes
        if (popped) {
            ctb_.add(std::move(*popped));
            peak_cluster_ = std::max(peak_cluster_, static_cast<int>(ctb_.size()));
        }
    }
}

Schedule SynopsisScheduler::take_schedule() { return std::move(schedule_); }

Schedule run_synopsis(TubeBuffer& gtb, const SynopsisOptions& options, double fps,
                      FrameSink* sink) {
    if (!gtb.closed())
        throw std::invalid_argument("synopsis: run_synopsis needs a closed tube buffer");
    SynopsisScheduler scheduler(options, fps, sink);
    scheduler.pump(gtb);
    return scheduler.take_schedule();
}

}  // namespace vsyn
