#include "eigbound/quadrature.hpp"

#include <stdexcept>

namespace eigbound {

namespace {

QuadRule make_degree2() {
    // edge-midpoint rule
    const double w = 1.0 / 3.0;
    return {2, {{0.5, 0.5, 0.0, w}, {0.0, 0.5, 0.5, w}, {0.5, 0.0, 0.5, w}}};
}

void push_sym3(std::vector<QuadPoint>& pts, double a, double b, double w) {
    pts.push_back({a, b, b, w});
    pts.push_back({b, a, b, w});
    pts.push_back({b, b, a, w});
}

void push_sym6(std::vector<QuadPoint>& pts, double a, double b, double c, double w) {
    pts.push_back({a, b, c, w});
    pts.push_back({a, c, b, w});
    pts.push_back({b, a, c, w});
    pts.push_back({b, c, a, w});
    pts.push_back({c, a, b, w});
    pts.push_back({c, b, a, w});
}

QuadRule make_degree4() {
    QuadRule r{4, {}};
    push_sym3(r.points, 0.108103018168070, 0.445948490915965, 0.223381589678011);
    push_sym3(r.points, 0.816847572980459, 0.091576213509771, 0.109951743655322);
    return r;
}

QuadRule make_degree6() {
    QuadRule r{6, {}};
    push_sym3(r.points, 0.873821971016996, 0.063089014491502, 0.050844906370207);
    push_sym3(r.points, 0.501426509658179, 0.249286745170910, 0.116786275726379);
    push_sym6(r.points, 0.636502499121399, 0.310352451033785, 0.053145049844816,
              0.082851075618374);
    return r;
}

// conical product of 5-point Gauss-Legendre: x = u(1-v), y = uv with
// Jacobian u; exact for total degree 8
QuadRule make_degree8() {
    const double node[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                            0.538469310105683, 0.906179845938664};
    const double weight[5] = {0.236926885056189, 0.478628670499366,
                              0.568888888888889, 0.478628670499366,
                              0.236926885056189};
    QuadRule r{8, {}};
    for (int i = 0; i < 5; ++i) {
        const double u = 0.5 * (node[i] + 1.0);
        const double wu = 0.5 * weight[i];
        for (int j = 0; j < 5; ++j) {
            const double v = 0.5 * (node[j] + 1.0);
            const double wv = 0.5 * weight[j];
            const double x = u * (1.0 - v);
            const double y = u * v;
            // weights normalized to sum 1 (factor 2 against the 1/2 area)
            r.points.push_back({1.0 - x - y, x, y, 2.0 * wu * wv * u});
        }
    }
    return r;
}

} // namespace

const QuadRule& triangle_quadrature(int degree) {
    static const QuadRule d2 = make_degree2();
    static const QuadRule d4 = make_degree4();
    static const QuadRule d6 = make_degree6();
    static const QuadRule d8 = make_degree8();
    if (degree <= 2) return d2;
    if (degree <= 4) return d4;
    if (degree <= 6) return d6;
    if (degree <= 8) return d8;
    throw std::invalid_argument("triangle_quadrature: degrees above 8 not shipped");
}

} // namespace eigbound
