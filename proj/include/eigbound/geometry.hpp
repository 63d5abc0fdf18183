#pragma once

#include <cmath>

namespace eigbound {

/// Planar point / vector.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Distance from p to the segment [a, b].
double segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Symmetric 2x2 matrix, stored as (xx, xy, yy).
struct SymMat2 {
    double xx = 1.0;
    double xy = 0.0;
    double yy = 1.0;

    static SymMat2 identity() { return {1.0, 0.0, 1.0}; }
    static SymMat2 scaled_identity(double s) { return {s, 0.0, s}; }

    Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
    double det() const { return xx * yy - xy * xy; }
    SymMat2 inverse() const {
        const double d = det();
        return {yy / d, -xy / d, xx / d};
    }
    /// Smaller eigenvalue of the matrix.
    double min_eigenvalue() const {
        const double tr = xx + yy;
        const double disc = std::sqrt((xx - yy) * (xx - yy) + 4.0 * xy * xy);
        return 0.5 * (tr - disc);
    }
};

} // namespace eigbound
