#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace vsyn {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }

inline double distance(Vec2 a, Vec2 b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct Vec2i {
    int x = 0;
    int y = 0;
    bool operator==(const Vec2i&) const = default;
};

/// Axis-aligned pixel rectangle, top-left origin, w/h in pixels.
struct Box {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
    bool operator==(const Box&) const = default;
};

inline std::int64_t area(const Box& b) {
    return static_cast<std::int64_t>(b.w) * b.h;
}

inline Vec2 center(const Box& b) {
    return {b.x + b.w / 2.0, b.y + b.h / 2.0};
}

inline double diagonal(const Box& b) {
    return std::hypot(static_cast<double>(b.w), static_cast<double>(b.h));
}

/// True iff the intersection has positive area; shared edges do not collide.
inline bool boxes_collide(const Box& a, const Box& b) {
    return a.x < b.x + b.w && b.x < a.x + a.w &&
           a.y < b.y + b.h && b.y < a.y + a.h;
}

inline std::int64_t intersection_area(const Box& a, const Box& b) {
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.x + a.w, b.x + b.w);
    const int y1 = std::min(a.y + a.h, b.y + b.h);
    if (x1 <= x0 || y1 <= y0) return 0;
    return static_cast<std::int64_t>(x1 - x0) * (y1 - y0);
}

inline double iou(const Box& a, const Box& b) {
    const std::int64_t inter = intersection_area(a, b);
    const std::int64_t uni = area(a) + area(b) - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

/// Even-odd ray-casting test; points on an edge count as inside.
bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon);

}  // namespace vsyn
