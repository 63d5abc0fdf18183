#pragma once

#include <vector>

#include "eigbound/geometry.hpp"

namespace eigbound {

/// Quadrature point in barycentric coordinates; weights sum to 1 so that
/// integrals are weighted by the physical cell area.
struct QuadPoint {
    double l0, l1, l2, w;
};

struct QuadRule {
    int degree = 0;
    std::vector<QuadPoint> points;
};

/// Smallest shipped rule exact for polynomials of the given total degree
/// (available degrees: 2, 4, 6).
const QuadRule& triangle_quadrature(int degree);

inline Vec2 barycentric_point(const QuadPoint& q, Vec2 p0, Vec2 p1, Vec2 p2) {
    return q.l0 * p0 + q.l1 * p1 + q.l2 * p2;
}

} // namespace eigbound
