#include "eigbound/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace eigbound {

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

const char* to_string(BoundaryLabel label) {
    switch (label) {
    case BoundaryLabel::dirichlet: return "dirichlet";
    case BoundaryLabel::neumann: return "neumann";
    case BoundaryLabel::steklov: return "steklov";
    }
    return "?";
}

namespace {

BoundaryLabel label_from_string(const std::string& s, int line) {
    if (s == "dirichlet") return BoundaryLabel::dirichlet;
    if (s == "neumann") return BoundaryLabel::neumann;
    if (s == "steklov") return BoundaryLabel::steklov;
    throw std::runtime_error("mesh parse: line " + std::to_string(line) +
                             ": unknown boundary label '" + s + "'");
}

std::pair<int, int> sorted_edge(int a, int b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

} // namespace

Mesh Mesh::build(std::vector<Vec2> points, std::vector<Cell> cells,
                 std::vector<BoundaryFacet> boundary, int level) {
    Mesh m;
    const int np = static_cast<int>(points.size());
    for (const Vec2& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::runtime_error("mesh: non-finite vertex coordinate");
    }

    double scale2 = 0.0;
    for (Cell& c : cells) {
        for (int v : c.v) {
            if (v < 0 || v >= np)
                throw std::runtime_error("mesh: cell vertex index out of range");
        }
        if (c.v[0] == c.v[1] || c.v[1] == c.v[2] || c.v[0] == c.v[2])
            throw std::runtime_error("mesh: cell with repeated vertex");
        const Vec2 e1 = points[c.v[1]] - points[c.v[0]];
        const Vec2 e2 = points[c.v[2]] - points[c.v[0]];
        scale2 = std::max({scale2, dot(e1, e1), dot(e2, e2)});
        double a2 = cross(e1, e2);
        if (a2 < 0.0) {
            std::swap(c.v[1], c.v[2]);  // reorient silently
            a2 = -a2;
        }
        if (a2 <= 1e-14 * scale2)
            throw std::runtime_error("mesh: degenerate (zero-area) cell");
    }

    // edge table: every undirected edge once, lower index first
    std::map<std::pair<int, int>, std::vector<int>> edge_cells;
    for (int t = 0; t < static_cast<int>(cells.size()); ++t) {
        const auto& v = cells[t].v;
        for (int k = 0; k < 3; ++k) {
            const auto key = sorted_edge(v[(k + 1) % 3], v[(k + 2) % 3]);
            auto& adj = edge_cells[key];
            adj.push_back(t);
            if (adj.size() > 2)
                throw std::runtime_error("mesh: non-manifold edge (" +
                                         std::to_string(key.first) + "," +
                                         std::to_string(key.second) +
                                         ") shared by more than two cells");
        }
    }

    m.edges_.reserve(edge_cells.size());
    std::map<std::pair<int, int>, int> edge_id;
    for (const auto& [key, adj] : edge_cells) {
        edge_id[key] = static_cast<int>(m.edges_.size());
        m.edges_.push_back({key.first, key.second});
    }

    // boundary facets must be exactly the single-cell edges, each labeled once
    std::map<std::pair<int, int>, int> facet_of_edge;
    for (int f = 0; f < static_cast<int>(boundary.size()); ++f) {
        const BoundaryFacet& bf = boundary[f];
        if (bf.a < 0 || bf.a >= np || bf.b < 0 || bf.b >= np)
            throw std::runtime_error("mesh: boundary facet index out of range");
        const auto key = sorted_edge(bf.a, bf.b);
        const auto it = edge_cells.find(key);
        if (it == edge_cells.end() || it->second.size() != 1)
            throw std::runtime_error("mesh: boundary facet (" +
                                     std::to_string(bf.a) + "," +
                                     std::to_string(bf.b) +
                                     ") is not an edge of exactly one cell");
        if (!facet_of_edge.emplace(key, f).second)
            throw std::runtime_error("mesh: boundary facet listed twice");
    }
    for (const auto& [key, adj] : edge_cells) {
        if (adj.size() == 1 && facet_of_edge.find(key) == facet_of_edge.end())
            throw std::runtime_error("mesh: unlabeled boundary edge (" +
                                     std::to_string(key.first) + "," +
                                     std::to_string(key.second) + ")");
    }

    // connectivity over shared edges
    if (!cells.empty()) {
        std::vector<char> seen(cells.size(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            const auto& v = cells[t].v;
            for (int k = 0; k < 3; ++k) {
                const auto key = sorted_edge(v[(k + 1) % 3], v[(k + 2) % 3]);
                for (int u : edge_cells[key]) {
                    if (!seen[u]) {
                        seen[u] = 1;
                        ++reached;
                        stack.push_back(u);
                    }
                }
            }
        }
        if (reached != cells.size())
            throw std::runtime_error("mesh: not edge-connected");
    }

    m.points_ = std::move(points);
    m.cells_ = std::move(cells);
    m.boundary_ = std::move(boundary);
    m.level_ = level;

    m.cell_edges_.resize(m.cells_.size());
    for (int t = 0; t < m.num_cells(); ++t) {
        const auto& v = m.cells_[t].v;
        CellEdges& ce = m.cell_edges_[t];
        for (int k = 0; k < 3; ++k) {
            const int a = v[(k + 1) % 3];
            const int b = v[(k + 2) % 3];
            const auto key = sorted_edge(a, b);
            ce.edge[k] = edge_id.at(key);
            const Vec2 pa = m.points_[key.first];
            const Vec2 pb = m.points_[key.second];
            ce.length[k] = norm(pb - pa);
            const Vec2 tangent = (pb - pa) / ce.length[k];
            const Vec2 n{tangent.y, -tangent.x};
            const Vec2 mid = 0.5 * (pa + pb);
            ce.sign[k] = dot(n, mid - m.points_[v[k]]) > 0.0 ? 1.0 : -1.0;
        }
    }

    m.facet_edge_.resize(m.boundary_.size());
    m.facet_cell_.resize(m.boundary_.size());
    for (int f = 0; f < m.num_boundary_facets(); ++f) {
        const auto key = sorted_edge(m.boundary_[f].a, m.boundary_[f].b);
        m.facet_edge_[f] = edge_id.at(key);
        m.facet_cell_[f] = edge_cells.at(key).front();
    }
    return m;
}

double Mesh::facet_length(int f) const {
    return norm(points_[boundary_[f].b] - points_[boundary_[f].a]);
}

int Mesh::edge_index(int a, int b) const {
    const auto key = sorted_edge(a, b);
    const Edge probe{key.first, key.second};
    const auto it = std::lower_bound(
        edges_.begin(), edges_.end(), probe, [](const Edge& l, const Edge& r) {
            return std::pair{l.a, l.b} < std::pair{r.a, r.b};
        });
    if (it == edges_.end() || it->a != probe.a || it->b != probe.b) return -1;
    return static_cast<int>(it - edges_.begin());
}

double Mesh::max_diameter() const {
    double h = 0.0;
    for (int t = 0; t < num_cells(); ++t) {
        const auto& ce = cell_edges_[t];
        h = std::max({h, ce.length[0], ce.length[1], ce.length[2]});
    }
    return h;
}

bool Mesh::has_label(BoundaryLabel label) const {
    return std::any_of(boundary_.begin(), boundary_.end(),
                       [label](const BoundaryFacet& f) { return f.label == label; });
}

// ----------------------------------------------------------------- parsing

namespace {

struct LineReader {
    std::istream& in;
    int line = 0;

    bool next(std::string& out) {
        std::string raw;
        while (std::getline(in, raw)) {
            ++line;
            const auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            // trim
            const auto b = raw.find_first_not_of(" \t\r");
            if (b == std::string::npos) continue;
            const auto e = raw.find_last_not_of(" \t\r");
            out = raw.substr(b, e - b + 1);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("mesh parse: line " + std::to_string(line) +
                                 ": " + what);
    }
};

} // namespace

Mesh parse_mesh(std::istream& in) {
    LineReader rd{in};
    std::string line;

    auto expect_section = [&](const char* name) -> int {
        if (!rd.next(line)) rd.fail(std::string("expected '") + name + " N'");
        std::istringstream ss(line);
        std::string word;
        long long n = -1;
        if (!(ss >> word >> n) || word != name || n < 0 || (ss >> word))
            rd.fail(std::string("expected '") + name + " N', got '" + line + "'");
        return static_cast<int>(n);
    };

    const int nv = expect_section("vertices");
    std::vector<Vec2> pts(nv);
    for (int i = 0; i < nv; ++i) {
        if (!rd.next(line)) rd.fail("unexpected end of file in vertices");
        std::istringstream ss(line);
        std::string extra;
        if (!(ss >> pts[i].x >> pts[i].y) || (ss >> extra))
            rd.fail("expected 'x y', got '" + line + "'");
    }

    const int nc = expect_section("cells");
    std::vector<Cell> cells(nc);
    for (int i = 0; i < nc; ++i) {
        if (!rd.next(line)) rd.fail("unexpected end of file in cells");
        std::istringstream ss(line);
        std::string extra;
        if (!(ss >> cells[i].v[0] >> cells[i].v[1] >> cells[i].v[2] >> cells[i].region) ||
            (ss >> extra))
            rd.fail("expected 'v0 v1 v2 region', got '" + line + "'");
    }

    const int nb = expect_section("boundary");
    std::vector<BoundaryFacet> bnd(nb);
    for (int i = 0; i < nb; ++i) {
        if (!rd.next(line)) rd.fail("unexpected end of file in boundary");
        std::istringstream ss(line);
        std::string lab, extra;
        if (!(ss >> bnd[i].a >> bnd[i].b >> lab) || (ss >> extra))
            rd.fail("expected 'v0 v1 label', got '" + line + "'");
        bnd[i].label = label_from_string(lab, rd.line);
    }
    if (rd.next(line)) rd.fail("trailing content '" + line + "'");

    return Mesh::build(std::move(pts), std::move(cells), std::move(bnd));
}

Mesh parse_mesh(const std::string& text) {
    std::istringstream ss(text);
    return parse_mesh(ss);
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
    char buf[64];
    out << "vertices " << mesh.num_points() << "\n";
    for (const Vec2& p : mesh.points()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g", p.x, p.y);
        out << buf << "\n";
    }
    out << "cells " << mesh.num_cells() << "\n";
    for (const Cell& c : mesh.cells())
        out << c.v[0] << " " << c.v[1] << " " << c.v[2] << " " << c.region << "\n";
    out << "boundary " << mesh.num_boundary_facets() << "\n";
    for (const BoundaryFacet& f : mesh.boundary())
        out << f.a << " " << f.b << " " << to_string(f.label) << "\n";
}

std::string write_mesh(const Mesh& mesh) {
    std::ostringstream ss;
    write_mesh(mesh, ss);
    return ss.str();
}

// ---------------------------------------------------------------- builtins

namespace {

struct MacroBuilder {
    std::vector<Vec2> pts;
    std::vector<Cell> cells;
    std::map<std::pair<long long, long long>, int> index;

    int point(double x, double y) {
        const auto key = std::pair{static_cast<long long>(std::llround(x * 1024)),
                                   static_cast<long long>(std::llround(y * 1024))};
        const auto it = index.find(key);
        if (it != index.end()) return it->second;
        const int id = static_cast<int>(pts.size());
        pts.push_back({x, y});
        index[key] = id;
        return id;
    }

    void tri(int a, int b, int c) { cells.push_back({{a, b, c}, 0}); }

    // split the unit square with lower-left corner (x0, y0)
    void square(double x0, double y0, char diag) {
        const int a = point(x0, y0);
        const int b = point(x0 + 1, y0);
        const int c = point(x0 + 1, y0 + 1);
        const int d = point(x0, y0 + 1);
        if (diag == '/') {
            tri(a, b, c);
            tri(a, c, d);
        } else {
            tri(a, b, d);
            tri(b, c, d);
        }
    }

    Mesh finish(BoundaryLabel label) {
        // boundary facets: edges on exactly one cell
        std::map<std::pair<int, int>, int> count;
        for (const Cell& c : cells)
            for (int k = 0; k < 3; ++k)
                ++count[sorted_edge(c.v[(k + 1) % 3], c.v[(k + 2) % 3])];
        std::vector<BoundaryFacet> bnd;
        for (const auto& [key, n] : count)
            if (n == 1) bnd.push_back({key.first, key.second, label});
        return Mesh::build(std::move(pts), std::move(cells), std::move(bnd));
    }
};

Mesh relevel(const Mesh& m, int level) {
    return Mesh::build(m.points(), m.cells(), m.boundary(), level);
}

Mesh lshape_mesh(bool steklov) {
    MacroBuilder mb;
    // backslash diagonals throughout (pinned by the reference tables)
    mb.square(-1, 0, '\\');
    mb.square(-1, -1, '\\');
    mb.square(0, -1, '\\');
    const Mesh macro = mb.finish(steklov ? BoundaryLabel::steklov
                                         : BoundaryLabel::dirichlet);
    return relevel(refine_red(macro), 0);
}

Mesh square_mesh() {
    MacroBuilder mb;
    mb.square(-1, 0, '/');
    mb.square(0, 0, '/');
    mb.square(-1, -1, '/');
    mb.square(0, -1, '/');
    Mesh m = relevel(refine_red(mb.finish(BoundaryLabel::dirichlet)), 0);
    // region encodes the diffusion quadrant (bit 0) and the gamma strip (bit 1)
    std::vector<Cell> cells = m.cells();
    for (Cell& c : cells) {
        const Vec2 cen = (m.points()[c.v[0]] + m.points()[c.v[1]] + m.points()[c.v[2]]) / 3.0;
        c.region = (cen.x * cen.y > 0.0 ? 1 : 0) | (std::abs(cen.y) > 0.5 ? 2 : 0);
    }
    return Mesh::build(m.points(), std::move(cells), m.boundary(), 0);
}

Mesh cook_mesh() {
    const std::vector<Vec2> pts = {
        {0.00000, 0.00000},   {22.36692, 20.50301}, {32.62352, 29.90490},
        {43.01651, 39.43180}, {48.00000, 44.00000}, {48.00000, 52.00000},
        {48.00000, 60.00000}, {34.18905, 55.39635}, {20.96553, 50.98851},
        {7.91553, 46.63851},  {0.00000, 44.00000},  {0.00000, 22.00000},
        {13.34761, 30.34226}, {25.34761, 37.84226}, {37.50718, 45.44199}};
    const int tris[16][3] = {{1, 13, 12},  {13, 1, 2},  {2, 14, 13}, {14, 2, 3},
                             {3, 15, 14},  {15, 3, 4},  {5, 15, 4},  {15, 5, 6},
                             {7, 15, 6},   {15, 7, 8},  {9, 15, 8},  {15, 9, 14},
                             {10, 14, 9},  {14, 10, 13}, {11, 13, 10}, {13, 11, 12}};
    std::vector<Cell> cells;
    for (const auto& t : tris)
        cells.push_back({{t[0] - 1, t[1] - 1, t[2] - 1}, 0});

    std::map<std::pair<int, int>, int> count;
    for (const Cell& c : cells)
        for (int k = 0; k < 3; ++k)
            ++count[sorted_edge(c.v[(k + 1) % 3], c.v[(k + 2) % 3])];
    std::vector<BoundaryFacet> bnd;
    for (const auto& [key, n] : count) {
        if (n != 1) continue;
        const bool on_left = std::abs(pts[key.first].x) < 1e-12 &&
                             std::abs(pts[key.second].x) < 1e-12;
        bnd.push_back({key.first, key.second,
                       on_left ? BoundaryLabel::dirichlet : BoundaryLabel::neumann});
    }
    return Mesh::build(pts, std::move(cells), std::move(bnd));
}

} // namespace

Mesh builtin_mesh(BuiltinMesh name, bool steklov_variant) {
    if (steklov_variant && name != BuiltinMesh::lshape_fig1)
        throw std::invalid_argument("steklov variant exists only for lshape_fig1");
    switch (name) {
    case BuiltinMesh::lshape_fig1: return lshape_mesh(steklov_variant);
    case BuiltinMesh::square_fig3: return square_mesh();
    case BuiltinMesh::cook_fig4: return cook_mesh();
    }
    throw std::invalid_argument("unknown builtin mesh");
}

Mesh refine_red(const Mesh& mesh) {
    std::vector<Vec2> pts = mesh.points();
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        const auto key = sorted_edge(a, b);
        const auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int id = static_cast<int>(pts.size());
        pts.push_back(0.5 * (pts[a] + pts[b]));
        midpoint[key] = id;
        return id;
    };

    std::vector<Cell> cells;
    cells.reserve(4 * mesh.cells().size());
    for (const Cell& c : mesh.cells()) {
        const int a = c.v[0], b = c.v[1], d = c.v[2];
        const int ab = mid(a, b), bd = mid(b, d), da = mid(d, a);
        cells.push_back({{a, ab, da}, c.region});
        cells.push_back({{ab, b, bd}, c.region});
        cells.push_back({{da, bd, d}, c.region});
        cells.push_back({{ab, bd, da}, c.region});
    }

    std::vector<BoundaryFacet> bnd;
    bnd.reserve(2 * mesh.boundary().size());
    for (const BoundaryFacet& f : mesh.boundary()) {
        const int w = mid(f.a, f.b);
        bnd.push_back({f.a, w, f.label});
        bnd.push_back({w, f.b, f.label});
    }
    return Mesh::build(std::move(pts), std::move(cells), std::move(bnd),
                       mesh.level() + 1);
}

CellGeometry cell_geometry(const Mesh& mesh, int cell) {
    if (cell < 0 || cell >= mesh.num_cells())
        throw std::invalid_argument("cell index out of range");
    const auto& v = mesh.cells()[cell].v;
    const Vec2 p0 = mesh.points()[v[0]];
    const Vec2 p1 = mesh.points()[v[1]];
    const Vec2 p2 = mesh.points()[v[2]];

    CellGeometry g;
    g.area = 0.5 * cross(p1 - p0, p2 - p0);
    if (!(g.area > 0.0))
        throw std::runtime_error("degenerate cell in cell_geometry");
    g.edge_lengths = {norm(p2 - p1), norm(p0 - p2), norm(p1 - p0)};
    g.diameter = std::max({g.edge_lengths[0], g.edge_lengths[1], g.edge_lengths[2]});
    const double per = g.edge_lengths[0] + g.edge_lengths[1] + g.edge_lengths[2];
    g.incenter = (g.edge_lengths[0] * p0 + g.edge_lengths[1] * p1 +
                  g.edge_lengths[2] * p2) / per;
    g.inradius = 2.0 * g.area / per;
    return g;
}

double inscribed_param_d(std::span<const Vec2> polygon, Vec2 x0) {
    const int n = static_cast<int>(polygon.size());
    if (n < 3) throw std::invalid_argument("inscribed_param_d: need >= 3 corners");

    // orientation of the polygon, then strict-interior test
    double area2 = 0.0;
    for (int i = 0; i < n; ++i)
        area2 += cross(polygon[i], polygon[(i + 1) % n]);
    const double orient = area2 >= 0.0 ? 1.0 : -1.0;
    double dist = std::numeric_limits<double>::infinity();
    double maxv = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec2 a = polygon[i];
        const Vec2 b = polygon[(i + 1) % n];
        if (orient * cross(b - a, x0 - a) <= 0.0)
            throw std::invalid_argument("inscribed_param_d: x0 on or outside the boundary");
        dist = std::min(dist, segment_distance(x0, a, b));
        maxv = std::max(maxv, norm(x0 - a));
    }
    return dist / maxv;
}

double inscribed_param_d(const Mesh& mesh, int cell) {
    const CellGeometry g = cell_geometry(mesh, cell);
    const auto& v = mesh.cells()[cell].v;
    const std::array<Vec2, 3> poly{mesh.points()[v[0]], mesh.points()[v[1]],
                                   mesh.points()[v[2]]};
    return inscribed_param_d(poly, g.incenter);
}

} // namespace eigbound
