#include "vsyn/frame_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace vsyn {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("frame_io: " + msg);
}

// ---------------------------------------------------------------- PPM / PGM

int read_pnm_token(std::istream& in) {
    // skips whitespace and '#' comments, then reads one unsigned integer
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c)) return -1;
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}

std::string frame_file_name(std::int64_t ordinal) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06lld.ppm", static_cast<long long>(ordinal));
    return buf;
}

class PpmDirectorySource final : public FrameSource {
public:
    PpmDirectorySource(fs::path dir, std::optional<VideoMeta> meta_override)
        : dir_(std::move(dir)) {
        meta_.fps = meta_override && meta_override->fps > 0 ? meta_override->fps : 18.0;
        std::int64_t count = 0;
        while (fs::exists(dir_ / frame_file_name(count))) ++count;
        // reject gaps: any extra frame_*.ppm beyond the contiguous prefix
        for (const auto& entry : fs::directory_iterator(dir_)) {
            const std::string name = entry.path().filename().string();
            if (name.size() == 16 && name.starts_with("frame_") && name.ends_with(".ppm")) {
                std::int64_t n = 0;
                auto [p, ec] = std::from_chars(name.data() + 6, name.data() + 12, n);
                if (ec == std::errc() && p == name.data() + 12 && n >= count)
                    fail("non-contiguous frame numbering in " + dir_.string() +
                         " (missing index " + std::to_string(count) + ")");
            }
        }
        meta_.total_frames = count;
        if (count > 0) {
            Frame first = read_ppm(dir_ / frame_file_name(0));
            meta_.width = first.width;
            meta_.height = first.height;
        }
    }

    std::optional<Frame> next() override {
        if (next_index_ >= meta_.total_frames) return std::nullopt;
        Frame f;
        try {
            f = read_ppm(dir_ / frame_file_name(next_index_));
        } catch (const std::exception& e) {
            fail("decode error at frame " + std::to_string(next_index_) + ": " + e.what());
        }
        if (f.width != meta_.width || f.height != meta_.height)
            fail("frame " + std::to_string(next_index_) + " dimensions " +
                 std::to_string(f.width) + "x" + std::to_string(f.height) +
                 " differ from stream " + std::to_string(meta_.width) + "x" +
                 std::to_string(meta_.height));
        f.index = next_index_;
        f.timestamp_ms = frame_timestamp_ms(next_index_, meta_.fps);
        ++next_index_;
        return f;
    }

    const VideoMeta& meta() const override { return meta_; }

private:
    fs::path dir_;
    VideoMeta meta_;
    std::int64_t next_index_ = 0;
};

class PpmDirectorySink final : public FrameSink {
public:
    PpmDirectorySink(fs::path dir, const VideoMeta& meta) : dir_(std::move(dir)), meta_(meta) {
        if (fs::exists(dir_) && !fs::is_directory(dir_))
            fail(dir_.string() + " exists and is not a directory");
        fs::create_directories(dir_);
    }

    void write(const Frame& frame) override {
        if (closed_) fail("write to closed sink");
        if (meta_.width == 0 && meta_.height == 0) {
            meta_.width = frame.width;
            meta_.height = frame.height;
        }
        if (frame.width != meta_.width || frame.height != meta_.height)
            fail("frame dimensions " + std::to_string(frame.width) + "x" +
                 std::to_string(frame.height) + " do not match sink " +
                 std::to_string(meta_.width) + "x" + std::to_string(meta_.height));
        write_ppm(dir_ / frame_file_name(written_), frame);
        ++written_;
        meta_.total_frames = written_;
    }

    void close() override { closed_ = true; }
    const VideoMeta& meta() const override { return meta_; }

private:
    fs::path dir_;
    VideoMeta meta_;
    std::int64_t written_ = 0;
    bool closed_ = false;
};

// ---------------------------------------------------------------- YUV4MPEG2

struct Y4mHeader {
    int width = 0;
    int height = 0;
    std::int64_t fps_num = 0;
    std::int64_t fps_den = 1;
    std::string colorspace = "C420";
};

Y4mHeader parse_y4m_header(const std::string& line) {
    std::istringstream in(line);
    std::string magic;
    in >> magic;
    if (magic != "YUV4MPEG2") fail("bad YUV4MPEG2 magic");
    Y4mHeader h;
    std::string tok;
    while (in >> tok) {
        switch (tok[0]) {
            case 'W': h.width = std::stoi(tok.substr(1)); break;
            case 'H': h.height = std::stoi(tok.substr(1)); break;
            case 'F': {
                const auto colon = tok.find(':');
                if (colon == std::string::npos) fail("garbled frame-rate token " + tok);
                h.fps_num = std::stoll(tok.substr(1, colon - 1));
                h.fps_den = std::stoll(tok.substr(colon + 1));
                break;
            }
            case 'C': h.colorspace = tok; break;
            case 'I':
            case 'A':
            case 'X': break;  // interlace/aspect/extension tokens are accepted and ignored
            default: fail("garbled header token " + tok);
        }
    }
    if (h.width <= 0 || h.height <= 0) fail("missing W/H in YUV4MPEG2 header");
    if (h.width % 2 || h.height % 2) fail("C420 requires even dimensions");
    if (h.fps_num <= 0 || h.fps_den <= 0) fail("missing F token in YUV4MPEG2 header");
    if (!h.colorspace.starts_with("C420")) fail("unsupported colorspace " + h.colorspace);
    return h;
}

class Y4mSource final : public FrameSource {
public:
    explicit Y4mSource(const fs::path& path) : in_(path, std::ios::binary) {
        if (!in_) fail("cannot open " + path.string());
        std::string line;
        if (!std::getline(in_, line)) fail("unreadable YUV4MPEG2 header");
        header_ = parse_y4m_header(line);
        meta_.width = header_.width;
        meta_.height = header_.height;
        meta_.fps = static_cast<double>(header_.fps_num) / static_cast<double>(header_.fps_den);
        frame_bytes_ = static_cast<std::int64_t>(header_.width) * header_.height * 3 / 2;
        const std::int64_t header_bytes = static_cast<std::int64_t>(line.size()) + 1;
        const std::int64_t payload = static_cast<std::int64_t>(fs::file_size(path)) - header_bytes;
        const std::int64_t per_frame = frame_bytes_ + 6;  // "FRAME\n"
        if (payload < 0 || payload % per_frame != 0)
            fail("truncated or garbled YUV4MPEG2 stream " + path.string());
        meta_.total_frames = payload / per_frame;
        buf_.resize(static_cast<std::size_t>(frame_bytes_));
    }

    std::optional<Frame> next() override {
        if (next_index_ >= meta_.total_frames) return std::nullopt;
        std::string marker(6, '\0');
        in_.read(marker.data(), 6);
        if (!in_ || marker != "FRAME\n")
            fail("decode error at frame " + std::to_string(next_index_) + ": bad FRAME marker");
        in_.read(reinterpret_cast<char*>(buf_.data()), frame_bytes_);
        if (!in_)
            fail("decode error at frame " + std::to_string(next_index_) + ": short read");
        Frame f;
        const std::size_t ysz = static_cast<std::size_t>(meta_.width) * meta_.height;
        yuv420_to_frame(buf_.data(), buf_.data() + ysz, buf_.data() + ysz + ysz / 4,
                        meta_.width, meta_.height, f);
        f.index = next_index_;
        f.timestamp_ms = frame_timestamp_ms(next_index_, meta_.fps);
        ++next_index_;
        return f;
    }

    const VideoMeta& meta() const override { return meta_; }

private:
    std::ifstream in_;
    Y4mHeader header_;
    VideoMeta meta_;
    std::int64_t frame_bytes_ = 0;
    std::int64_t next_index_ = 0;
    std::vector<std::uint8_t> buf_;
};

std::pair<std::int64_t, std::int64_t> fps_to_ratio(double fps) {
    const std::int64_t num = std::llround(fps * 1000.0);
    const std::int64_t g = std::gcd(num, std::int64_t{1000});
    return {num / g, 1000 / g};
}

class Y4mSink final : public FrameSink {
public:
    Y4mSink(const fs::path& path, const VideoMeta& meta) : meta_(meta) {
        if (meta.width <= 0 || meta.height <= 0) fail("y4m sink needs explicit dimensions");
        if (meta.width % 2 || meta.height % 2) fail("C420 requires even dimensions");
        if (meta.fps <= 0) fail("y4m sink needs fps > 0");
        out_.open(path, std::ios::binary | std::ios::trunc);
        if (!out_) fail("cannot create " + path.string());
        const auto [num, den] = fps_to_ratio(meta.fps);
        out_ << "YUV4MPEG2 W" << meta.width << " H" << meta.height
             << " F" << num << ":" << den << " Ip A1:1 C420\n";
        meta_.total_frames = 0;
    }

    void write(const Frame& frame) override {
        if (closed_) fail("write to closed sink");
        if (frame.width != meta_.width || frame.height != meta_.height)
            fail("frame dimensions do not match sink");
        frame_to_yuv420(frame, y_, u_, v_);
        out_ << "FRAME\n";
        out_.write(reinterpret_cast<const char*>(y_.data()), static_cast<std::streamsize>(y_.size()));
        out_.write(reinterpret_cast<const char*>(u_.data()), static_cast<std::streamsize>(u_.size()));
        out_.write(reinterpret_cast<const char*>(v_.data()), static_cast<std::streamsize>(v_.size()));
        if (!out_) fail("write failure");
        meta_.total_frames++;
    }

    void close() override {
        if (!closed_) out_.flush();
        closed_ = true;
    }

    const VideoMeta& meta() const override { return meta_; }

private:
    std::ofstream out_;
    VideoMeta meta_;
    std::vector<std::uint8_t> y_, u_, v_;
    bool closed_ = false;
};

}  // namespace

Frame read_ppm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '6') fail("not a P6 PPM: " + path.string());
    const int w = read_pnm_token(in);
    const int h = read_pnm_token(in);
    const int maxval = read_pnm_token(in);  // consumes the single whitespace after it
    if (w <= 0 || h <= 0 || maxval != 255) fail("garbled PPM header: " + path.string());
    Frame f(w, h);
    in.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(f.pixels.size()));
    if (!in) fail("short PPM payload: " + path.string());
    return f;
}

void write_ppm(const fs::path& path, const Frame& frame) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot create " + path.string());
    out << "P6\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) fail("write failure: " + path.string());
}

void write_pgm(const fs::path& path, int width, int height, const std::uint8_t* gray) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot create " + path.string());
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(gray), static_cast<std::streamsize>(width) * height);
    if (!out) fail("write failure: " + path.string());
}

void rgb_to_ycbcr(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                  std::uint8_t& y, std::uint8_t& cb, std::uint8_t& cr) {
    const int ri = r, gi = g, bi = b;
    const int yy = 16 + ((16829 * ri + 33039 * gi + 6416 * bi + 32768) >> 16);
    const int cbv = 128 + ((-9714 * ri - 19071 * gi + 28784 * bi + 32768) >> 16);
    const int crv = 128 + ((28784 * ri - 24103 * gi - 4681 * bi + 32768) >> 16);
    y = static_cast<std::uint8_t>(std::clamp(yy, 16, 235));
    cb = static_cast<std::uint8_t>(std::clamp(cbv, 16, 240));
    cr = static_cast<std::uint8_t>(std::clamp(crv, 16, 240));
}

void ycbcr_to_rgb(std::uint8_t y, std::uint8_t cb, std::uint8_t cr,
                  std::uint8_t& r, std::uint8_t& g, std::uint8_t& b) {
    const int c = y - 16, d = cb - 128, e = cr - 128;
    r = static_cast<std::uint8_t>(std::clamp((76309 * c + 104597 * e + 32768) >> 16, 0, 255));
    g = static_cast<std::uint8_t>(std::clamp((76309 * c - 25675 * d - 53279 * e + 32768) >> 16, 0, 255));
    b = static_cast<std::uint8_t>(std::clamp((76309 * c + 132201 * d + 32768) >> 16, 0, 255));
}

void frame_to_yuv420(const Frame& frame, std::vector<std::uint8_t>& y,
                     std::vector<std::uint8_t>& u, std::vector<std::uint8_t>& v) {
    const int w = frame.width, h = frame.height;
    if (w % 2 || h % 2) fail("C420 requires even dimensions");
    y.resize(static_cast<std::size_t>(w) * h);
    u.resize(static_cast<std::size_t>(w / 2) * (h / 2));
    v.resize(static_cast<std::size_t>(w / 2) * (h / 2));
    std::vector<std::uint8_t> cb_full(static_cast<std::size_t>(w) * h);
    std::vector<std::uint8_t> cr_full(static_cast<std::size_t>(w) * h);
    for (int row = 0; row < h; ++row) {
        const std::uint8_t* src = frame.row(row);
        std::uint8_t* ydst = y.data() + static_cast<std::size_t>(row) * w;
        std::uint8_t* cbdst = cb_full.data() + static_cast<std::size_t>(row) * w;
        std::uint8_t* crdst = cr_full.data() + static_cast<std::size_t>(row) * w;
        for (int col = 0; col < w; ++col)
            rgb_to_ycbcr(src[3 * col], src[3 * col + 1], src[3 * col + 2],
                         ydst[col], cbdst[col], crdst[col]);
    }
    for (int row = 0; row < h / 2; ++row) {
        for (int col = 0; col < w / 2; ++col) {
            const std::size_t i0 = static_cast<std::size_t>(2 * row) * w + 2 * col;
            const std::size_t i1 = i0 + w;
            const std::size_t out = static_cast<std::size_t>(row) * (w / 2) + col;
            u[out] = static_cast<std::uint8_t>(
                (cb_full[i0] + cb_full[i0 + 1] + cb_full[i1] + cb_full[i1 + 1] + 2) >> 2);
            v[out] = static_cast<std::uint8_t>(
                (cr_full[i0] + cr_full[i0 + 1] + cr_full[i1] + cr_full[i1 + 1] + 2) >> 2);
        }
    }
}

void yuv420_to_frame(const std::uint8_t* y, const std::uint8_t* u, const std::uint8_t* v,
                     int width, int height, Frame& out) {
    out = Frame(width, height);
    for (int row = 0; row < height; ++row) {
        std::uint8_t* dst = out.row(row);
        const std::uint8_t* ysrc = y + static_cast<std::size_t>(row) * width;
        const std::uint8_t* usrc = u + static_cast<std::size_t>(row / 2) * (width / 2);
        const std::uint8_t* vsrc = v + static_cast<std::size_t>(row / 2) * (width / 2);
        for (int col = 0; col < width; ++col)
            ycbcr_to_rgb(ysrc[col], usrc[col / 2], vsrc[col / 2],
                         dst[3 * col], dst[3 * col + 1], dst[3 * col + 2]);
    }
}

std::unique_ptr<FrameSource> open_frame_source(const fs::path& path,
                                               std::optional<VideoMeta> meta_override) {
    if (!fs::exists(path)) fail("no such path: " + path.string());
    if (fs::is_directory(path))
        return std::make_unique<PpmDirectorySource>(path, std::move(meta_override));
    return std::make_unique<Y4mSource>(path);
}

std::unique_ptr<FrameSink> open_frame_sink(const fs::path& path, const VideoMeta& meta) {
    if (path.extension() == ".y4m") return std::make_unique<Y4mSink>(path, meta);
    return std::make_unique<PpmDirectorySink>(path, meta);
}

}  // namespace vsyn
