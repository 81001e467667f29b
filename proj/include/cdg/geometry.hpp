#pragma once

#include <array>
#include <cmath>

namespace cdg {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double a) const { return {a * x, a * y}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double a, Vec2 v) { return {a * v.x, a * v.y}; }

// 2x2 matrix, column-major interpretation: columns are images of the
// reference unit vectors (d/dxi, d/deta).
struct Mat2 {
    double a = 0.0, b = 0.0;  // row 0
    double c = 0.0, d = 0.0;  // row 1

    double det() const { return a * d - b * c; }
    Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    // (J^{-T}) v without forming the inverse; caller supplies det.
    Vec2 inv_transpose_apply(Vec2 v, double det_value) const {
        return {(d * v.x - c * v.y) / det_value, (-b * v.x + a * v.y) / det_value};
    }
};

struct BBox {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
};

}  // namespace cdg
